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

#ifndef CORRUPT_BENCH_FEATURE_METRICS_HPP_
#define CORRUPT_BENCH_FEATURE_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corrupt_bench/embedding.hpp"

namespace corrupt_bench {

/// Feature rows in double precision. The metric kernels run on this type so
/// that invariance checks are not limited by float storage.
struct DenseFeatures {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // rows x dim
  std::vector<std::uint32_t> labels;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * dim, dim);
  }
  static DenseFeatures from(const EmbeddingSet& set);
  /// Unit-norm rows; throws DegenerateInputError on a zero row.
  DenseFeatures normalized() const;
};

// ---------------------------------------------------------------------------
// Semantic fluctuation

/// T x C per-class accuracy, one row per checkpoint.
struct CheckpointSeries {
  std::size_t num_classes = 0;
  std::vector<std::size_t> epochs;           // epoch index of each row
  std::vector<std::vector<double>> per_class;  // per_class[t][c]

  std::size_t size() const noexcept { return per_class.size(); }
  void validate() const;
};

struct FluctuationResult {
  std::vector<double> per_class;  // TV_i
  double mean = 0.0;
};

/// TV_i = 1/(T-1) * sum_t |acc_i(t+1) - acc_i(t)|. Requires T >= 2.
FluctuationResult semantic_fluctuation(const CheckpointSeries& series);

// ---------------------------------------------------------------------------
// Uniformity

/// Exact pair enumeration is used up to this many eligible rows in kAuto mode.
inline constexpr std::size_t kExactUniformityLimit = 2048;
/// kAuto sampling draws this many pairs per eligible row above the limit.
inline constexpr std::size_t kSampledPairsPerRow = 100;

struct UniformitySampling {
  enum class Mode { kAuto, kExact, kSampled };
  Mode mode = Mode::kAuto;
  std::size_t pairs = 0;  // kSampled only
  std::uint64_t seed = 0;

  static UniformitySampling exact() { return {Mode::kExact, 0, 0}; }
  static UniformitySampling sampled(std::size_t m, std::uint64_t seed) {
    return {Mode::kSampled, m, seed};
  }
  std::string describe() const;
};

struct UniformityEstimate {
  double value = 0.0;
  std::size_t n_pairs = 0;
  bool exact = true;
};

/// -log of the mean Gaussian potential exp(-2 |f(a) - f(b)|^2) over distinct
/// pairs a != b of l2-normalized rows, optionally restricted to one class.
UniformityEstimate uniformity(const DenseFeatures& unit_rows, std::optional<std::uint32_t> subset,
                              const UniformitySampling& sampling = {});
/// Normalizes internally when the set is not flagged normalized.
UniformityEstimate uniformity(const EmbeddingSet& set, std::optional<std::uint32_t> subset = std::nullopt,
                              const UniformitySampling& sampling = {});

// ---------------------------------------------------------------------------
// Class feature distance

/// Mean |f(a) - f(b)|^2 over a in class i, b in class j (distinct pairs when
/// i == j). Uses the features as given. Symmetric in (i, j) bit for bit.
double feature_distance(const DenseFeatures& features, std::uint32_t class_i, std::uint32_t class_j);
double feature_distance(const EmbeddingSet& set, std::uint32_t class_i, std::uint32_t class_j);

/// C x C matrix of feature_distance. Diagonal entries of classes with fewer
/// than 2 members and rows/columns of absent classes are NaN.
std::vector<std::vector<double>> distance_matrix(const DenseFeatures& features,
                                                 std::size_t num_classes);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_FEATURE_METRICS_HPP_
