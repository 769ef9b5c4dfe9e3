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

#ifndef CORRUPT_BENCH_PIPELINE_HPP_
#define CORRUPT_BENCH_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "corrupt_bench/augment.hpp"
#include "corrupt_bench/config_text.hpp"
#include "corrupt_bench/corruptions.hpp"
#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

using PipelineStage = std::variant<CorruptionSpec, AugmentationSpec>;

enum class PipelineMode { kCorruptThenAugment, kAugmentThenCorrupt, kCustom };

const char* pipeline_mode_name(PipelineMode mode) noexcept;
PipelineMode parse_pipeline_mode(std::string_view name);

/// Ordered stages. Corruption stages draw their randomness once from their own
/// seed and are identical for every image; augmentation stages draw from a
/// per-image stream keyed by (seed, image index, epoch, stage index).
struct TransformPipeline {
  std::vector<PipelineStage> stages;
  PipelineMode mode = PipelineMode::kCustom;
  std::uint64_t seed = 0;

  bool empty() const noexcept { return stages.empty(); }

  /// Corruptions followed by augmentations, or the reverse.
  static TransformPipeline ordered(const std::vector<CorruptionSpec>& corruptions,
                                   const std::vector<AugmentationSpec>& augmentations,
                                   PipelineMode mode, std::uint64_t seed);
};

/// Applies every stage in order; output order matches input order. Stage
/// failures are rethrown with the stage index prefixed.
LabeledDataset apply_pipeline(const LabeledDataset& ds, const TransformPipeline& pipe,
                              std::size_t epoch);

// ---------------------------------------------------------------------------
// Declarative form: one `stage = kind(param=value, ...)` per line, applied top
// to bottom, plus optional `mode = ...` and `seed = ...` lines.
//
//   gamma(gamma=)                 global_shuffle(p=, seed=)   local_shuffle(p=, seed=)
//   longtail(max=, min=, seed=)   uniform_subsample(per_class=, seed=)
//   substitute(path=, tolerance=)
//   random_crop(padding=)  hflip(prob=)  color_jitter(strength=, prob=)
//   grayscale(prob=)       resize(target=)
//
// Corruptions accept an optional `label=`. A corruption without `seed=` gets
// derive_seed(pipeline seed, stage index).

bool is_corruption_name(std::string_view name) noexcept;
bool is_augmentation_name(std::string_view name) noexcept;

/// `load_substitute` controls whether substitute(path=) reads the dataset.
CorruptionSpec parse_corruption(const CallExpr& call, std::uint64_t default_seed,
                                bool load_substitute = true);
AugmentationSpec parse_augmentation(const CallExpr& call);
PipelineStage parse_stage(const CallExpr& call, std::uint64_t default_seed,
                          bool load_substitute = true);

/// `seed` is the CLI-level seed; a `seed =` line in the text overrides it.
TransformPipeline parse_pipeline(std::string_view text, std::uint64_t seed);

/// Canonical text forms with every parameter spelled out.
std::string format_corruption(const CorruptionSpec& spec);
std::string format_augmentation(const AugmentationSpec& spec);
std::string format_stage(const PipelineStage& stage);
std::string format_pipeline(const TransformPipeline& pipe);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_PIPELINE_HPP_
