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

#include <benchmark/benchmark.h>

#include <random>

#include "corrupt_bench/corruptions.hpp"

namespace cb = corrupt_bench;

namespace {

cb::ImageTensor noise_image(std::size_t side) {
  std::mt19937_64 gen(side);
  cb::ImageTensor img(cb::ImageShape{side, side, 3});
  for (auto& v : img.mutable_data()) v = static_cast<std::uint8_t>(gen());
  return img;
}

void BM_GammaTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cb::make_gamma_table(5.0));
}
BENCHMARK(BM_GammaTable);

void BM_GammaImage(benchmark::State& state) {
  const cb::ImageTensor img = noise_image(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cb::gamma_distort(img, 5.0));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.data().size()));
}
BENCHMARK(BM_GammaImage)->Arg(32)->Arg(224);

void BM_GlobalShuffle(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto patch = static_cast<std::size_t>(state.range(1));
  const cb::ImageTensor img = noise_image(side);
  const cb::Permutation perm = cb::make_patch_permutation(side, patch, 7, cb::ShuffleScope::kGlobal);
  for (auto _ : state) benchmark::DoNotOptimize(cb::global_shuffle(img, patch, perm));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.data().size()));
}
BENCHMARK(BM_GlobalShuffle)->Args({32, 4})->Args({32, 8})->Args({224, 16});

void BM_LocalShuffle(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto patch = static_cast<std::size_t>(state.range(1));
  const cb::ImageTensor img = noise_image(side);
  const cb::Permutation perm = cb::make_patch_permutation(side, patch, 7, cb::ShuffleScope::kLocal);
  for (auto _ : state) benchmark::DoNotOptimize(cb::local_shuffle(img, patch, perm));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(img.data().size()));
}
BENCHMARK(BM_LocalShuffle)->Args({32, 2})->Args({32, 4})->Args({224, 16});

}  // namespace
