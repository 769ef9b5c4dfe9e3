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

#ifndef CORRUPT_BENCH_CORRUPTIONS_HPP_
#define CORRUPT_BENCH_CORRUPTIONS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

enum class CorruptionKind {
  kGamma,
  kGlobalShuffle,
  kLocalShuffle,
  kLongTailSubsample,
  kUniformSubsample,
  kDatasetSubstitute,
};

const char* corruption_kind_name(CorruptionKind kind) noexcept;

/// True for corruptions that act on each image; false for dataset-level ones.
constexpr bool is_image_level(CorruptionKind kind) noexcept {
  return kind == CorruptionKind::kGamma || kind == CorruptionKind::kGlobalShuffle ||
         kind == CorruptionKind::kLocalShuffle;
}

/// One corruption with every parameter and seed that fixes its randomness.
///
/// Only the fields relevant to `kind` are read. A corruption is a fixed
/// dataset-level transform: the permutation or subsample is decided once from
/// `seed` and applied consistently to every image.
struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kGamma;
  double gamma = 1.0;                 // kGamma
  std::size_t patch = 1;              // shuffles: patch side p
  std::size_t max_per_class = 0;      // kLongTailSubsample head count
  std::size_t min_per_class = 0;      // kLongTailSubsample tail count
  std::size_t per_class = 0;          // kUniformSubsample
  double count_tolerance = 0.05;      // kDatasetSubstitute, relative per-class
  std::string substitute_path;        // kDatasetSubstitute, informational
  std::shared_ptr<const LabeledDataset> substitute;  // kDatasetSubstitute
  std::uint64_t seed = 0;
  std::string label;                  // report label; empty means default_label()

  /// Short row label: "gamma5", "G4x4", "L8x8", "LT1280-5", "UF100", "SUB".
  std::string default_label() const;
  std::string display_label() const { return label.empty() ? default_label() : label; }
  /// Checks parameter ranges that do not depend on the image shape.
  void validate() const;
};

/// A bijection on {0..n-1}.
class Permutation {
 public:
  Permutation() = default;
  /// Throws ParameterError unless `mapping` is a bijection.
  explicit Permutation(std::vector<std::size_t> mapping);
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return mapping_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return mapping_[i]; }
  const std::vector<std::size_t>& mapping() const noexcept { return mapping_; }
  Permutation inverse() const;
  bool is_identity() const noexcept;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> mapping_;
};

enum class ShuffleScope { kGlobal, kLocal };

// ---------------------------------------------------------------------------
// Pixel level

/// 256-entry table of floor(255 * (x/255)^gamma).
std::array<std::uint8_t, 256> make_gamma_table(double gamma);
ImageTensor gamma_distort(const ImageTensor& img, double gamma);
ImageTensor apply_lookup(const ImageTensor& img, const std::array<std::uint8_t, 256>& table);

// ---------------------------------------------------------------------------
// Patch level

/// Global: permutation of the (s/p)^2 patch indices. Local: permutation of the
/// p^2 pixel positions inside a patch. Fisher-Yates over the seeded stream.
Permutation make_patch_permutation(std::size_t side, std::size_t patch, std::uint64_t seed,
                                   ShuffleScope scope);

/// Patch at row-major grid index i moves to grid index perm[i].
ImageTensor global_shuffle(const ImageTensor& img, std::size_t patch, const Permutation& perm);
/// Inside every patch, pixel at within-patch index j moves to perm[j]. One
/// permutation is shared by all patches.
ImageTensor local_shuffle(const ImageTensor& img, std::size_t patch, const Permutation& perm);

// ---------------------------------------------------------------------------
// Dataset level

/// Per-rank target counts: round(max * (min/max)^(k/(C-1))), rank 0 = head.
std::vector<std::size_t> longtail_rank_counts(std::size_t num_classes, std::size_t max_per_class,
                                              std::size_t min_per_class);

struct SubsampleResult {
  LabeledDataset dataset;
  ClassProfile profile;              // indexed by class id
  std::vector<std::uint32_t> ranking;  // ranking[k] = class id at rank k
};

/// Class ranking is a seeded shuffle of class ids; samples are drawn without
/// replacement and kept in their original dataset order.
SubsampleResult longtail_subsample(const LabeledDataset& ds, std::size_t max_per_class,
                                   std::size_t min_per_class, std::uint64_t seed);
SubsampleResult uniform_subsample(const LabeledDataset& ds, std::size_t per_class,
                                  std::uint64_t seed);

/// Swaps `original` for `substitute` after checking class count, image shape,
/// and that per-class counts agree within `count_tolerance` (relative).
LabeledDataset substitute_dataset(const LabeledDataset& original, const LabeledDataset& substitute,
                                  double count_tolerance = 0.05);

/// Image-level corruption prepared for a fixed shape: the gamma table or the
/// permutation is computed once and reused for every image.
class PreparedCorruption {
 public:
  PreparedCorruption(const CorruptionSpec& spec, const ImageShape& shape);
  ImageTensor apply(const ImageTensor& img) const;
  const Permutation& permutation() const noexcept { return perm_; }

 private:
  CorruptionKind kind_;
  std::size_t patch_ = 1;
  std::array<std::uint8_t, 256> table_{};
  Permutation perm_;
};

/// Applies one corruption to a whole dataset (image-level ones to every image).
LabeledDataset apply_corruption(const LabeledDataset& ds, const CorruptionSpec& spec);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_CORRUPTIONS_HPP_
