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

#ifndef CORRUPT_BENCH_SYNTHETIC_HPP_
#define CORRUPT_BENCH_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

/// Procedural image classification fixture.
///
/// Each class has `modes_per_class` prototypes, each a few colored Gaussian
/// blobs on a tinted background. A sample picks one of its class's prototypes
/// at random and shifts it by up to `max_shift` pixels,
/// scaled by a random brightness, with per-pixel Gaussian noise. Labels cycle
/// through the classes, so splits are balanced.
struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::size_t train_size = 2000;
  std::size_t test_size = 1000;
  std::size_t side = 16;
  std::size_t channels = 3;
  std::size_t blobs_per_class = 3;   // blobs per prototype
  std::size_t modes_per_class = 1;   // prototypes per class
  std::size_t max_shift = 3;
  double noise = 120.0;          // pixel noise std-dev, in 0..255 units
  double brightness_jitter = 0.4;
  std::uint64_t seed = 0;
};

struct SyntheticSplits {
  LabeledDataset train;
  LabeledDataset test;
};

SyntheticSplits make_synthetic(const SyntheticSpec& spec);

/// Two well separated Gaussian blobs in feature space, 2 classes, at the given
/// dimension. Returned as raw rows for linear-probe style fixtures.
struct BlobFeatures {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> features;
  std::vector<std::uint32_t> labels;
};
BlobFeatures make_blob_features(std::size_t per_class, std::size_t dim, double separation,
                                double spread, std::uint64_t seed);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_SYNTHETIC_HPP_
