/* Copyright 2026 The corrupt-bench Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

     https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CORRUPT_BENCH_PARALLEL_HPP_
#define CORRUPT_BENCH_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace corrupt_bench {

/// Worker cap. Reads CORRUPT_BENCH_THREADS (positive integer) on first use,
/// otherwise the hardware concurrency. set_thread_limit overrides both.
std::size_t thread_limit();
void set_thread_limit(std::size_t n);

/// Runs body(i) for every i in [0, n) across up to thread_limit() workers.
///
/// Work is split into contiguous static ranges. Results must be written to
/// slots owned by i; with that discipline the output does not depend on the
/// schedule or on the worker count. The first exception thrown by any body is
/// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_PARALLEL_HPP_
