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

#include "corrupt_bench/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "corrupt_bench/error.hpp"

namespace corrupt_bench {

EmbeddingSet::EmbeddingSet(std::size_t rows, std::size_t dim, std::vector<float> features,
                           std::vector<std::uint32_t> labels, bool normalized)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)), normalized_(normalized) {
  if (dim_ == 0) throw FormatError("embedding dimension must be >= 1");
  if (labels_.size() != rows) {
    throw FormatError("embedding has " + std::to_string(rows) + " rows but " +
                      std::to_string(labels_.size()) + " labels");
  }
  if (features_.size() != rows * dim_) {
    throw FormatError("embedding feature count " + std::to_string(features_.size()) +
                      " != N*D = " + std::to_string(rows * dim_));
  }
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k])) {
      throw FormatError("non-finite feature at row " + std::to_string(k / dim_) + ", column " +
                        std::to_string(k % dim_));
    }
  }
  if (normalized_) {
    for (std::size_t i = 0; i < rows; ++i) {
      double sq = 0.0;
      for (float v : row(i)) sq += static_cast<double>(v) * v;
      if (std::abs(std::sqrt(sq) - 1.0) > kNormalizedTolerance) {
        throw FormatError("row " + std::to_string(i) + " flagged normalized but has norm " +
                          std::to_string(std::sqrt(sq)));
      }
    }
  }
}

std::size_t EmbeddingSet::num_classes() const noexcept {
  if (labels_.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels_.begin(), labels_.end())) + 1;
}

std::vector<std::size_t> EmbeddingSet::indices_of(std::uint32_t label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

EmbeddingSet l2_normalize(const EmbeddingSet& set) {
  const std::size_t n = set.rows();
  const std::size_t d = set.dim();
  std::vector<float> out(set.features().begin(), set.features().end());
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += static_cast<double>(out[i * d + j]) * out[i * d + j];
    if (sq == 0.0) throw DegenerateInputError("cannot normalize all-zero row " + std::to_string(i));
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] = static_cast<float>(static_cast<double>(out[i * d + j]) * inv);
    }
  }
  return EmbeddingSet(n, d, std::move(out), set.labels(), true);
}

EmbeddingSet ensure_normalized(const EmbeddingSet& set) {
  return set.normalized() ? set : l2_normalize(set);
}

}  // namespace corrupt_bench
