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

#ifndef CORRUPT_BENCH_EXPERIMENT_HPP_
#define CORRUPT_BENCH_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrupt_bench/augment.hpp"
#include "corrupt_bench/corruptions.hpp"
#include "corrupt_bench/evaluation.hpp"
#include "corrupt_bench/feature_metrics.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/pipeline.hpp"
#include "corrupt_bench/report.hpp"
#include "corrupt_bench/synthetic.hpp"
#include "corrupt_bench/trainer.hpp"

namespace corrupt_bench {

enum class ExperimentMode { kDownstream, kPretrain };
enum class EvaluationKind { kKnn, kLinear };
enum class EmbeddingSource { kExternal, kBuiltin };

/// Embedding files for one report row in external mode. Downstream rows use
/// train/test (a clean-trained model embedding the corrupted splits).
/// Pre-training rows use train/test (model trained on corrupted data,
/// embedding corrupted splits) and optionally train_original/test_original
/// (the same model embedding the clean splits).
struct ExternalEmbedding {
  std::string label;
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path train_original;
  std::filesystem::path test_original;
};

/// Image data for builtin-probe mode.
struct DataSource {
  enum class Kind { kSynthetic, kFiles };
  Kind kind = Kind::kSynthetic;
  SyntheticSpec synthetic{};
  std::filesystem::path train;
  std::filesystem::path test;
};

/// Declarative experiment description, parsed from `key = value` lines.
///
///   mode = downstream | pretrain
///   seed = 7
///   evaluation = knn(k=50, tau=0.07) | linear(epochs=100, lr=0.5, batch=64, weight_decay=0)
///   source = builtin | external
///   corruption = gamma(gamma=5)                      (repeatable, grid order)
///   embeddings = Orig(train=a.emb, test=b.emb)        (external; one per row label)
///   data = synthetic(classes=10, train=2000, test=1000, size=16) | files(train=..., test=...)
///   probe = mlp(hidden=64, features=32, lambda=0, epochs=50, batch=64, lr=0.05)
///   augment = random_crop(padding=2)                  (repeatable)
///   order = corrupt_then_augment | augment_then_corrupt | both
///   metrics = on | off
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kDownstream;
  std::uint64_t seed = 0;
  std::vector<CorruptionSpec> corruptions;
  EvaluationKind evaluation = EvaluationKind::kKnn;
  KnnConfig knn{};
  LinearProbeConfig linear{};
  EmbeddingSource source = EmbeddingSource::kBuiltin;
  std::vector<ExternalEmbedding> embeddings;
  DataSource data{};
  TrainConfig probe{};
  std::vector<AugmentationSpec> augmentations;
  std::vector<PipelineMode> orders{PipelineMode::kCorruptThenAugment};
  bool metrics = false;
  UniformitySampling sampling{};

  /// Cross-field checks (duplicate labels, k vs data, batch vs lambda, ...).
  void validate() const;
  /// Canonical text form; two configs are semantically equal iff their
  /// canonical forms are equal.
  std::string canonical() const;
  /// fnv1a64 of canonical().
  std::uint64_t hash() const;
};

/// Parses the experiment grammar. Relative paths resolve against `base_dir`.
/// Throws ConfigError with the offending line number.
ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Row labels a report for `cfg` will contain, Orig first.
std::vector<std::string> required_row_labels(const ExperimentConfig& cfg);

/// Accuracy of `query` given `bank` under the configured evaluation.
AccuracyResult evaluate_embeddings(const ExperimentConfig& cfg, const EmbeddingSet& bank,
                                   const EmbeddingSet& query);

/// Clean train/test splits for builtin mode in the experiment's data source.
SyntheticSplits load_experiment_data(const ExperimentConfig& cfg);

/// Robustness Test I: a probe trained on clean data (or externally supplied
/// embeddings) evaluated on each corrupted version of the downstream data.
MetricsReport run_downstream_test(const ExperimentConfig& cfg);
/// Robustness Test II: the probe is trained on each corrupted training set and
/// evaluated on the corrupted and the original test split.
MetricsReport run_pretrain_test(const ExperimentConfig& cfg);
/// Dispatches on cfg.mode and validates the result.
MetricsReport run_experiment(const ExperimentConfig& cfg);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_EXPERIMENT_HPP_
