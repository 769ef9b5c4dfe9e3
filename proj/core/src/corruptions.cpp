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

#include "corrupt_bench/corruptions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

std::string short_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::size_t square_side(const ImageTensor& img, std::size_t patch, const char* op) {
  if (img.height() != img.width()) {
    throw ParameterError(std::string(op) + " requires a square image, got " +
                         std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  const std::size_t s = img.height();
  if (patch == 0 || patch > s || s % patch != 0) {
    throw ParameterError(std::string(op) + ": image side " + std::to_string(s) +
                         " is not divisible by patch size " + std::to_string(patch));
  }
  return s;
}

// Copies a p x p block between two images of identical shape.
void copy_block(const ImageTensor& src, std::size_t sy, std::size_t sx, ImageTensor& dst,
                std::size_t dy, std::size_t dx, std::size_t p) {
  const std::size_t c = src.channels();
  const auto in = src.data();
  auto out = dst.mutable_data();
  for (std::size_t r = 0; r < p; ++r) {
    const std::size_t from = src.index(sy + r, sx, 0);
    const std::size_t to = dst.index(dy + r, dx, 0);
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(from), p * c,
                out.begin() + static_cast<std::ptrdiff_t>(to));
  }
}

}  // namespace

const char* corruption_kind_name(CorruptionKind kind) noexcept {
  switch (kind) {
    case CorruptionKind::kGamma: return "gamma";
    case CorruptionKind::kGlobalShuffle: return "global_shuffle";
    case CorruptionKind::kLocalShuffle: return "local_shuffle";
    case CorruptionKind::kLongTailSubsample: return "longtail";
    case CorruptionKind::kUniformSubsample: return "uniform_subsample";
    case CorruptionKind::kDatasetSubstitute: return "substitute";
  }
  return "unknown";
}

std::string CorruptionSpec::default_label() const {
  switch (kind) {
    case CorruptionKind::kGamma: return "gamma" + short_number(gamma);
    case CorruptionKind::kGlobalShuffle:
      return "G" + std::to_string(patch) + "x" + std::to_string(patch);
    case CorruptionKind::kLocalShuffle:
      return "L" + std::to_string(patch) + "x" + std::to_string(patch);
    case CorruptionKind::kLongTailSubsample:
      return "LT" + std::to_string(max_per_class) + "-" + std::to_string(min_per_class);
    case CorruptionKind::kUniformSubsample: return "UF" + std::to_string(per_class);
    case CorruptionKind::kDatasetSubstitute: return "SUB";
  }
  return "unknown";
}

void CorruptionSpec::validate() const {
  switch (kind) {
    case CorruptionKind::kGamma:
      if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("gamma must be a finite positive number, got " + short_number(gamma));
      }
      break;
    case CorruptionKind::kGlobalShuffle:
    case CorruptionKind::kLocalShuffle:
      if (patch == 0) throw ParameterError("patch size must be >= 1");
      break;
    case CorruptionKind::kLongTailSubsample:
      if (min_per_class < 1 || max_per_class < min_per_class) {
        throw ParameterError("long-tail subsample requires max >= min >= 1");
      }
      break;
    case CorruptionKind::kUniformSubsample:
      if (per_class < 1) throw ParameterError("uniform subsample requires per_class >= 1");
      break;
    case CorruptionKind::kDatasetSubstitute:
      if (!substitute) throw ParameterError("substitute corruption has no substitute dataset");
      if (count_tolerance < 0.0) throw ParameterError("count tolerance must be >= 0");
      break;
  }
}

// ---------------------------------------------------------------------------

Permutation::Permutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (std::size_t v : mapping_) {
    if (v >= mapping_.size() || seen[v]) throw ParameterError("mapping is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = i;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < mapping_.size(); ++i) {
    if (mapping_[i] != i) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::array<std::uint8_t, 256> make_gamma_table(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("gamma must be a finite positive number, got " + short_number(gamma));
  }
  std::array<std::uint8_t, 256> table{};
  const long double g = gamma;
  for (int x = 0; x < 256; ++x) {
    const long double v = 255.0L * std::pow(static_cast<long double>(x) / 255.0L, g);
    // Values that are integers in exact arithmetic (x = 0, x = 255, gamma = 1)
    // can land a few ulps below the integer; snap those before flooring.
    const long double nearest = std::round(v);
    long double floored = std::floor(v);
    if (std::abs(v - nearest) <= 1e-12L * 255.0L) floored = nearest;
    table[static_cast<std::size_t>(x)] =
        static_cast<std::uint8_t>(std::clamp<long double>(floored, 0.0L, 255.0L));
  }
  return table;
}

ImageTensor apply_lookup(const ImageTensor& img, const std::array<std::uint8_t, 256>& table) {
  ImageTensor out = img;
  for (auto& v : out.mutable_data()) v = table[v];
  return out;
}

ImageTensor gamma_distort(const ImageTensor& img, double gamma) {
  return apply_lookup(img, make_gamma_table(gamma));
}

Permutation make_patch_permutation(std::size_t side, std::size_t patch, std::uint64_t seed,
                                   ShuffleScope scope) {
  if (patch == 0 || patch > side || side % patch != 0) {
    throw ParameterError("image side " + std::to_string(side) +
                         " is not divisible by patch size " + std::to_string(patch));
  }
  const std::size_t grid = side / patch;
  const std::size_t n = scope == ShuffleScope::kGlobal ? grid * grid : patch * patch;
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  const std::uint64_t stream = scope == ShuffleScope::kGlobal ? 0x676c6f62ULL : 0x6c6f6361ULL;
  Rng rng(derive_seed(seed, stream));
  rng.shuffle(std::span<std::size_t>(m));
  return Permutation(std::move(m));
}

ImageTensor global_shuffle(const ImageTensor& img, std::size_t patch, const Permutation& perm) {
  const std::size_t s = square_side(img, patch, "global_shuffle");
  const std::size_t grid = s / patch;
  if (perm.size() != grid * grid) {
    throw ParameterError("global_shuffle permutation length " + std::to_string(perm.size()) +
                         " != (s/p)^2 = " + std::to_string(grid * grid));
  }
  ImageTensor out(img.shape());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const std::size_t to = perm[i];
    copy_block(img, (i / grid) * patch, (i % grid) * patch, out, (to / grid) * patch,
               (to % grid) * patch, patch);
  }
  return out;
}

ImageTensor local_shuffle(const ImageTensor& img, std::size_t patch, const Permutation& perm) {
  const std::size_t s = square_side(img, patch, "local_shuffle");
  if (perm.size() != patch * patch) {
    throw ParameterError("local_shuffle permutation length " + std::to_string(perm.size()) +
                         " != p^2 = " + std::to_string(patch * patch));
  }
  const std::size_t c = img.channels();
  const auto in = img.data();
  ImageTensor out(img.shape());
  auto dst = out.mutable_data();
  for (std::size_t by = 0; by < s; by += patch) {
    for (std::size_t bx = 0; bx < s; bx += patch) {
      for (std::size_t j = 0; j < perm.size(); ++j) {
        const std::size_t to = perm[j];
        const std::size_t from_idx = img.index(by + j / patch, bx + j % patch, 0);
        const std::size_t to_idx = img.index(by + to / patch, bx + to % patch, 0);
        for (std::size_t ch = 0; ch < c; ++ch) dst[to_idx + ch] = in[from_idx + ch];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> longtail_rank_counts(std::size_t num_classes, std::size_t max_per_class,
                                              std::size_t min_per_class) {
  if (min_per_class < 1 || max_per_class < min_per_class) {
    throw ParameterError("long-tail profile requires max >= min >= 1");
  }
  std::vector<std::size_t> counts(num_classes, max_per_class);
  if (num_classes < 2) return counts;
  const double ratio = static_cast<double>(min_per_class) / static_cast<double>(max_per_class);
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(num_classes - 1);
    counts[k] = static_cast<std::size_t>(
        std::llround(static_cast<double>(max_per_class) * std::pow(ratio, frac)));
  }
  // Endpoints are exact by definition.
  counts.front() = max_per_class;
  counts.back() = min_per_class;
  return counts;
}

namespace {

SubsampleResult subsample_by_rank(const LabeledDataset& ds, const std::vector<std::size_t>& rank_counts,
                                  std::uint64_t seed) {
  const std::size_t classes = ds.num_classes();
  std::vector<std::uint32_t> ranking(classes);
  std::iota(ranking.begin(), ranking.end(), 0u);
  Rng rank_rng(derive_seed(seed, 0x72616e6bULL));
  rank_rng.shuffle(std::span<std::uint32_t>(ranking));

  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < ds.size(); ++i) members[ds.label(i)].push_back(i);

  ClassProfile profile{std::vector<std::size_t>(classes, 0)};
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < classes; ++k) {
    const std::uint32_t cls = ranking[k];
    const std::size_t want = rank_counts[k];
    auto& pool = members[cls];
    if (pool.size() < want) {
      throw CapacityError("class " + std::to_string(cls) + " has " + std::to_string(pool.size()) +
                          " samples but " + std::to_string(want) + " are required");
    }
    Rng pick(derive_seed(seed, 0x636c7373ULL, cls));
    // Partial Fisher-Yates: the first `want` slots become the sample.
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(pick.uniform_index(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    profile.counts[cls] = want;
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<ImageTensor> images;
  std::vector<std::uint32_t> labels;
  images.reserve(chosen.size());
  labels.reserve(chosen.size());
  for (std::size_t i : chosen) {
    images.push_back(ds.image(i));
    labels.push_back(ds.label(i));
  }
  return SubsampleResult{LabeledDataset(std::move(images), std::move(labels), classes),
                         std::move(profile), std::move(ranking)};
}

}  // namespace

SubsampleResult longtail_subsample(const LabeledDataset& ds, std::size_t max_per_class,
                                   std::size_t min_per_class, std::uint64_t seed) {
  return subsample_by_rank(ds, longtail_rank_counts(ds.num_classes(), max_per_class, min_per_class),
                           seed);
}

SubsampleResult uniform_subsample(const LabeledDataset& ds, std::size_t per_class,
                                  std::uint64_t seed) {
  if (per_class < 1) throw ParameterError("uniform subsample requires per_class >= 1");
  return subsample_by_rank(ds, std::vector<std::size_t>(ds.num_classes(), per_class), seed);
}

LabeledDataset substitute_dataset(const LabeledDataset& original, const LabeledDataset& substitute,
                                  double count_tolerance) {
  if (substitute.num_classes() != original.num_classes()) {
    throw CompatibilityError("substitute has " + std::to_string(substitute.num_classes()) +
                             " classes, original has " + std::to_string(original.num_classes()));
  }
  if (!original.empty() && !substitute.empty() && !(substitute.shape() == original.shape())) {
    throw CompatibilityError("substitute image shape differs from original");
  }
  const auto want = original.label_histogram();
  const auto have = substitute.label_histogram();
  for (std::size_t c = 0; c < want.size(); ++c) {
    const double diff = std::abs(static_cast<double>(have[c]) - static_cast<double>(want[c]));
    if (diff > count_tolerance * static_cast<double>(want[c])) {
      throw CompatibilityError("class " + std::to_string(c) + " count " + std::to_string(have[c]) +
                               " differs from original " + std::to_string(want[c]) +
                               " beyond tolerance");
    }
  }
  return substitute;
}

// ---------------------------------------------------------------------------

PreparedCorruption::PreparedCorruption(const CorruptionSpec& spec, const ImageShape& shape)
    : kind_(spec.kind), patch_(spec.patch) {
  spec.validate();
  switch (kind_) {
    case CorruptionKind::kGamma:
      table_ = make_gamma_table(spec.gamma);
      break;
    case CorruptionKind::kGlobalShuffle:
    case CorruptionKind::kLocalShuffle:
      if (shape.height != shape.width) {
        throw ParameterError("patch shuffling requires square images");
      }
      perm_ = make_patch_permutation(shape.height, spec.patch, spec.seed,
                                     kind_ == CorruptionKind::kGlobalShuffle ? ShuffleScope::kGlobal
                                                                             : ShuffleScope::kLocal);
      break;
    default:
      throw ParameterError(std::string(corruption_kind_name(kind_)) +
                           " is a dataset-level corruption");
  }
}

ImageTensor PreparedCorruption::apply(const ImageTensor& img) const {
  switch (kind_) {
    case CorruptionKind::kGamma: return apply_lookup(img, table_);
    case CorruptionKind::kGlobalShuffle: return global_shuffle(img, patch_, perm_);
    case CorruptionKind::kLocalShuffle: return local_shuffle(img, patch_, perm_);
    default: break;
  }
  throw ParameterError("not an image-level corruption");
}

LabeledDataset apply_corruption(const LabeledDataset& ds, const CorruptionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CorruptionKind::kLongTailSubsample:
      return longtail_subsample(ds, spec.max_per_class, spec.min_per_class, spec.seed).dataset;
    case CorruptionKind::kUniformSubsample:
      return uniform_subsample(ds, spec.per_class, spec.seed).dataset;
    case CorruptionKind::kDatasetSubstitute:
      return substitute_dataset(ds, *spec.substitute, spec.count_tolerance);
    default: break;
  }
  if (ds.empty()) return ds;
  const PreparedCorruption prepared(spec, ds.shape());
  std::vector<ImageTensor> images(ds.size());
  parallel_for(ds.size(), [&](std::size_t i) { images[i] = prepared.apply(ds.image(i)); });
  return LabeledDataset(std::move(images), ds.labels(), ds.num_classes());
}

}  // namespace corrupt_bench
