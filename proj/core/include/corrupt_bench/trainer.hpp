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

#ifndef CORRUPT_BENCH_TRAINER_HPP_
#define CORRUPT_BENCH_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrupt_bench/embedding.hpp"
#include "corrupt_bench/evaluation.hpp"
#include "corrupt_bench/feature_metrics.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/mlp.hpp"
#include "corrupt_bench/pipeline.hpp"

namespace corrupt_bench {

/// Supervised probe training: CE - lambda * U_batch with plain SGD.
struct TrainConfig {
  double lambda = 0.0;  // +0.01 promotes uniformity, -0.01 suppresses it
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 1;
  std::vector<std::size_t> hidden = {512};  // hidden widths before the feature layer
  std::size_t feature_dim = 128;
  KnnConfig knn{};  // per-class probe accuracy at checkpoints

  void validate() const;
  /// [input_dim, hidden..., feature_dim, num_classes]
  std::vector<std::size_t> layer_sizes(std::size_t input_dim, std::size_t num_classes) const;
};

struct TrainResult {
  MlpModel model;
  CheckpointSeries series;                // per-class KNN accuracy on the eval set
  std::vector<EmbeddingSet> eval_features;  // probe_features() per checkpoint
  std::vector<double> epoch_loss;         // mean minibatch loss per epoch
};

/// Pixels scaled to [0, 1], one flattened (y, x, c) row per image.
Matrix images_to_matrix(const LabeledDataset& ds);

/// Feature-layer activations of every image, unnormalized.
EmbeddingSet embed(const MlpModel& model, const LabeledDataset& ds);

/// Value placed in the first coordinate of an all-zero feature row.
inline constexpr float kDeadFeatureValue = 1e-6f;

/// embed() with every all-zero (dead ReLU) row replaced by kDeadFeatureValue
/// on the first axis, so the set can always be l2-normalized. These are the
/// features used for KNN, linear probing and metrics on the builtin probe.
EmbeddingSet probe_features(const MlpModel& model, const LabeledDataset& ds);

/// Seeded network for `cfg` and the dataset's input shape.
MlpModel make_probe_model(const TrainConfig& cfg, const ImageShape& shape, std::size_t num_classes);

/// Trains `init` on `train`. When `augment` is given, epoch e trains on
/// apply_pipeline(train, *augment, e). At every checkpoint the eval-set
/// features are recorded together with per-class weighted-KNN accuracy whose
/// bank is `bank` (default: the untransformed train set). Trailing minibatches
/// smaller than 2 are dropped.
TrainResult train_probe(const MlpModel& init, const LabeledDataset& train, const TrainConfig& cfg,
                        const LabeledDataset& eval, const TransformPipeline* augment = nullptr,
                        const LabeledDataset* bank = nullptr);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_TRAINER_HPP_
