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

#include "corrupt_bench/mlp.hpp"

namespace cb = corrupt_bench;

namespace {

/// One loss_and_grad call on a batch of 64 CIFAR-sized inputs.
void BM_LossAndGrad(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) / 100.0;
  const cb::MlpModel model = cb::MlpModel::random({3072, 128, 64, 10}, 1);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cb::Matrix batch(64, 3072);
  for (auto& v : batch.data) v = u(gen);
  std::vector<std::uint32_t> labels(64);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint32_t>(i % 10);
  for (auto _ : state) benchmark::DoNotOptimize(cb::loss_and_grad(model, batch, labels, lambda));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_LossAndGrad)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
