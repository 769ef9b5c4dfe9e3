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

#ifndef CORRUPT_BENCH_EMBEDDING_HPP_
#define CORRUPT_BENCH_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corrupt_bench {

/// Unit-norm tolerance for rows of a set flagged as normalized.
inline constexpr double kNormalizedTolerance = 1e-5;

/// N x D float feature matrix (row-major) with one class label per row.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Validates shape, finiteness, and the normalized flag.
  EmbeddingSet(std::size_t rows, std::size_t dim, std::vector<float> features,
               std::vector<std::uint32_t> labels, bool normalized = false);

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool normalized() const noexcept { return normalized_; }

  std::span<const float> features() const noexcept { return features_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(features_).subspan(i * dim_, dim_);
  }
  const std::vector<std::uint32_t>& labels() const noexcept { return labels_; }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }

  /// max(label) + 1, or 0 when empty.
  std::size_t num_classes() const noexcept;

  /// Rows whose label is `label`, in order.
  std::vector<std::size_t> indices_of(std::uint32_t label) const;

  bool operator==(const EmbeddingSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> features_;
  std::vector<std::uint32_t> labels_;
  bool normalized_ = false;
};

/// Scales every row to unit l2 norm. Throws DegenerateInputError naming the
/// first all-zero row.
EmbeddingSet l2_normalize(const EmbeddingSet& set);

/// Returns `set` unchanged when already flagged normalized, else l2_normalize.
EmbeddingSet ensure_normalized(const EmbeddingSet& set);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_EMBEDDING_HPP_
