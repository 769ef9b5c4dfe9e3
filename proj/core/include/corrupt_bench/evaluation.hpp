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

#ifndef CORRUPT_BENCH_EVALUATION_HPP_
#define CORRUPT_BENCH_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corrupt_bench/embedding.hpp"

namespace corrupt_bench {

/// Top-1 accuracy plus per-class recall.
struct AccuracyResult {
  double top1 = 0.0;
  std::vector<double> per_class;            // correct_c / count_c; 0 for unseen classes
  std::vector<std::size_t> per_class_count;  // evaluated samples per class
  std::size_t n_eval = 0;
};

AccuracyResult compute_accuracy(std::span<const std::uint32_t> predicted,
                                std::span<const std::uint32_t> truth, std::size_t num_classes);

// ---------------------------------------------------------------------------
// Weighted KNN

struct KnnConfig {
  std::size_t k = 50;
  double temperature = 0.07;

  void validate() const;
};

struct KnnResult {
  std::vector<std::uint32_t> predictions;
  AccuracyResult accuracy;
};

/// Cosine-similarity KNN over l2-normalized features (normalized internally
/// when a set is not flagged). Class score is sum of exp(sim / temperature)
/// over the K most similar train rows; similarity ties rank the lower train
/// index first and score ties pick the smaller class id.
KnnResult knn_predict(const EmbeddingSet& train, const EmbeddingSet& query, const KnnConfig& cfg);

// ---------------------------------------------------------------------------
// Linear probe

struct LinearProbeConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.5;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  double weight_decay = 0.0;
  /// l2-normalize features before fitting and evaluation.
  bool normalize = true;

  void validate() const;
};

/// Multinomial logistic regression, logits = W x + b.
struct LinearModel {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<double> weights;  // num_classes x dim, row-major
  std::vector<double> bias;     // num_classes
  bool normalize_inputs = true;
  double initial_loss = 0.0;       // full-data mean CE before training
  double final_loss = 0.0;         // full-data mean CE after training
  std::vector<double> epoch_loss;  // mean minibatch CE per epoch
  /// Set when final_loss > initial_loss.
  bool loss_increased = false;

  /// Argmax of logits, ties toward the smaller class id.
  std::uint32_t predict(std::span<const float> features) const;
};

/// Mini-batch SGD with a seeded per-epoch shuffle, constant learning rate.
/// Weights start at zero.
LinearModel train_linear_probe(const EmbeddingSet& train, const LinearProbeConfig& cfg);
/// Also returns the predictions in `predictions` when non-null.
AccuracyResult evaluate_linear(const LinearModel& model, const EmbeddingSet& test,
                               std::vector<std::uint32_t>* predictions = nullptr);

// ---------------------------------------------------------------------------

/// (acc_original - acc_corrupted) / acc_original. Negative when the corrupted
/// accuracy is higher. Throws UndefinedMetricError when acc_original <= 0.
double robustness_delta(double acc_original, double acc_corrupted);

/// Delta as a percentage with one decimal: 0.0242 -> "2.4".
std::string format_delta_pct(double delta);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_EVALUATION_HPP_
