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

#include "corrupt_bench/evaluation.hpp"
#include "corrupt_bench/feature_metrics.hpp"

namespace cb = corrupt_bench;

namespace {

cb::EmbeddingSet gaussian_set(std::size_t rows, std::size_t dim, std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> nd(0.0f, 1.0f);
  std::vector<float> data(rows * dim);
  for (auto& v : data) v = nd(gen);
  std::vector<std::uint32_t> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = static_cast<std::uint32_t>(i % classes);
  return cb::EmbeddingSet(rows, dim, std::move(data), std::move(labels));
}

void BM_KnnPredict(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const cb::EmbeddingSet bank = gaussian_set(n, 64, 10, 1);
  const cb::EmbeddingSet query = gaussian_set(n / 2, 64, 10, 2);
  for (auto _ : state) benchmark::DoNotOptimize(cb::knn_predict(bank, query, cb::KnnConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(query.rows()));
}
BENCHMARK(BM_KnnPredict)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_UniformityExact(benchmark::State& state) {
  const cb::DenseFeatures f =
      cb::DenseFeatures::from(gaussian_set(static_cast<std::size_t>(state.range(0)), 64, 10, 3)).normalized();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cb::uniformity(f, std::nullopt, cb::UniformitySampling::exact()));
  }
}
BENCHMARK(BM_UniformityExact)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FeatureDistanceMatrix(benchmark::State& state) {
  const cb::DenseFeatures f = cb::DenseFeatures::from(gaussian_set(2000, 64, 10, 4)).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(cb::distance_matrix(f, 10));
}
BENCHMARK(BM_FeatureDistanceMatrix)->Unit(benchmark::kMillisecond);

}  // namespace
