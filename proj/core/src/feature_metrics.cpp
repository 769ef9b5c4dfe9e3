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

#include "corrupt_bench/feature_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

// Fixed reduction granularity; block sums are combined in block order so the
// result does not depend on the worker count.
constexpr std::size_t kRowBlock = 32;
constexpr std::size_t kPairBlock = 4096;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

std::vector<std::size_t> eligible_rows(const DenseFeatures& f, std::optional<std::uint32_t> subset) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < f.rows; ++i) {
    if (!subset || f.labels[i] == *subset) idx.push_back(i);
  }
  return idx;
}

double ordered_sum(const std::vector<double>& parts) {
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace

DenseFeatures DenseFeatures::from(const EmbeddingSet& set) {
  DenseFeatures f;
  f.rows = set.rows();
  f.dim = set.dim();
  f.data.assign(set.features().begin(), set.features().end());
  f.labels = set.labels();
  return f;
}

DenseFeatures DenseFeatures::normalized() const {
  DenseFeatures out = *this;
  for (std::size_t i = 0; i < rows; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sq += out.data[i * dim + j] * out.data[i * dim + j];
    if (sq == 0.0) throw DegenerateInputError("cannot normalize all-zero row " + std::to_string(i));
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < dim; ++j) out.data[i * dim + j] *= inv;
  }
  return out;
}

// ---------------------------------------------------------------------------

void CheckpointSeries::validate() const {
  if (per_class.size() != epochs.size() && !epochs.empty()) {
    throw FormatError("checkpoint series epoch count does not match row count");
  }
  for (const auto& row : per_class) {
    if (row.size() != num_classes) throw FormatError("checkpoint row has wrong class count");
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) throw FormatError("checkpoint accuracy outside [0, 1]");
    }
  }
}

FluctuationResult semantic_fluctuation(const CheckpointSeries& series) {
  series.validate();
  const std::size_t t = series.size();
  if (t < 2) {
    throw InsufficientDataError("semantic fluctuation needs at least 2 checkpoints, got " +
                                std::to_string(t));
  }
  FluctuationResult r;
  r.per_class.assign(series.num_classes, 0.0);
  for (std::size_t c = 0; c < series.num_classes; ++c) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < t; ++s) {
      total += std::abs(series.per_class[s + 1][c] - series.per_class[s][c]);
    }
    r.per_class[c] = total / static_cast<double>(t - 1);
  }
  double total = 0.0;
  for (double v : r.per_class) total += v;
  r.mean = series.num_classes == 0 ? 0.0 : total / static_cast<double>(series.num_classes);
  return r;
}

// ---------------------------------------------------------------------------

std::string UniformitySampling::describe() const {
  switch (mode) {
    case Mode::kAuto:
      return "auto: exact distinct pairs up to " + std::to_string(kExactUniformityLimit) +
             " rows, else " + std::to_string(kSampledPairsPerRow) + "*N sampled pairs (seed " +
             std::to_string(seed) + ")";
    case Mode::kExact: return "exact distinct pairs";
    case Mode::kSampled:
      return std::to_string(pairs) + " sampled distinct pairs (seed " + std::to_string(seed) + ")";
  }
  return "";
}

UniformityEstimate uniformity(const DenseFeatures& f, std::optional<std::uint32_t> subset,
                              const UniformitySampling& sampling) {
  const std::vector<std::size_t> idx = eligible_rows(f, subset);
  const std::size_t n = idx.size();
  if (n < 2) {
    throw InsufficientDataError("uniformity needs at least 2 rows" +
                                (subset ? " in class " + std::to_string(*subset) : std::string()) +
                                ", got " + std::to_string(n));
  }

  bool exact = sampling.mode == UniformitySampling::Mode::kExact;
  std::size_t m = sampling.pairs;
  if (sampling.mode == UniformitySampling::Mode::kAuto) {
    exact = n <= kExactUniformityLimit;
    m = kSampledPairsPerRow * n;
  }

  UniformityEstimate est;
  est.exact = exact;
  double total = 0.0;
  if (exact) {
    const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
    std::vector<double> parts(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
      double s = 0.0;
      const std::size_t end = std::min(n, (b + 1) * kRowBlock);
      for (std::size_t a = b * kRowBlock; a < end; ++a) {
        const auto ra = f.row(idx[a]);
        for (std::size_t c = a + 1; c < n; ++c) s += std::exp(-2.0 * squared_distance(ra, f.row(idx[c])));
      }
      parts[b] = s;
    });
    total = ordered_sum(parts);
    est.n_pairs = n * (n - 1) / 2;
  } else {
    if (m == 0) throw ParameterError("sampled uniformity needs at least one pair");
    std::vector<std::pair<std::size_t, std::size_t>> pairs(m);
    Rng rng(sampling.seed);
    for (auto& p : pairs) {
      const std::size_t a = static_cast<std::size_t>(rng.uniform_index(n));
      std::size_t b = static_cast<std::size_t>(rng.uniform_index(n - 1));
      if (b >= a) ++b;
      p = {idx[a], idx[b]};
    }
    const std::size_t blocks = (m + kPairBlock - 1) / kPairBlock;
    std::vector<double> parts(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
      double s = 0.0;
      const std::size_t end = std::min(m, (b + 1) * kPairBlock);
      for (std::size_t k = b * kPairBlock; k < end; ++k) {
        s += std::exp(-2.0 * squared_distance(f.row(pairs[k].first), f.row(pairs[k].second)));
      }
      parts[b] = s;
    });
    total = ordered_sum(parts);
    est.n_pairs = m;
  }
  const double mean = total / static_cast<double>(est.n_pairs);
  // All pairs coincident gives mean == 1 up to rounding; clamp so U >= 0.
  est.value = std::max(0.0, -std::log(mean));
  return est;
}

UniformityEstimate uniformity(const EmbeddingSet& set, std::optional<std::uint32_t> subset,
                              const UniformitySampling& sampling) {
  const DenseFeatures f = DenseFeatures::from(set);
  return uniformity(set.normalized() ? f : f.normalized(), subset, sampling);
}

// ---------------------------------------------------------------------------

double feature_distance(const DenseFeatures& f, std::uint32_t class_i, std::uint32_t class_j) {
  // Canonical order makes d(i, j) and d(j, i) the same sum.
  const std::uint32_t lo = std::min(class_i, class_j);
  const std::uint32_t hi = std::max(class_i, class_j);
  const auto a = eligible_rows(f, lo);
  const auto b = eligible_rows(f, hi);
  if (a.empty()) throw InsufficientDataError("class " + std::to_string(lo) + " is empty");
  if (b.empty()) throw InsufficientDataError("class " + std::to_string(hi) + " is empty");

  double total = 0.0;
  std::size_t count = 0;
  if (lo == hi) {
    if (a.size() < 2) {
      throw InsufficientDataError("intra-class distance needs at least 2 members in class " +
                                  std::to_string(lo));
    }
    for (std::size_t x = 0; x < a.size(); ++x) {
      for (std::size_t y = x + 1; y < a.size(); ++y) total += squared_distance(f.row(a[x]), f.row(a[y]));
    }
    count = a.size() * (a.size() - 1) / 2;
  } else {
    for (std::size_t x : a) {
      for (std::size_t y : b) total += squared_distance(f.row(x), f.row(y));
    }
    count = a.size() * b.size();
  }
  return total / static_cast<double>(count);
}

double feature_distance(const EmbeddingSet& set, std::uint32_t class_i, std::uint32_t class_j) {
  return feature_distance(DenseFeatures::from(set), class_i, class_j);
}

std::vector<std::vector<double>> distance_matrix(const DenseFeatures& f, std::size_t num_classes) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> out(num_classes, std::vector<double>(num_classes, nan));
  std::vector<std::size_t> count(num_classes, 0);
  for (auto l : f.labels) {
    if (l < num_classes) ++count[l];
  }
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < num_classes; ++i) {
    for (std::size_t j = i; j < num_classes; ++j) {
      if (count[i] == 0 || count[j] == 0) continue;
      if (i == j && count[i] < 2) continue;
      cells.emplace_back(i, j);
    }
  }
  std::vector<double> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    values[k] = feature_distance(f, static_cast<std::uint32_t>(cells[k].first),
                                 static_cast<std::uint32_t>(cells[k].second));
  });
  for (std::size_t k = 0; k < cells.size(); ++k) {
    out[cells[k].first][cells[k].second] = values[k];
    out[cells[k].second][cells[k].first] = values[k];
  }
  return out;
}

}  // namespace corrupt_bench
