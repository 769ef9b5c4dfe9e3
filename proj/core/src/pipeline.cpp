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

#include "corrupt_bench/pipeline.hpp"

#include <memory>
#include <optional>
#include <utility>

#include "corrupt_bench/dataset_io.hpp"
#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

bool is_image_stage(const PipelineStage& stage) {
  if (const auto* c = std::get_if<CorruptionSpec>(&stage)) return is_image_level(c->kind);
  return true;
}

[[noreturn]] void rethrow_with_stage(const Error& e, std::size_t stage) {
  throw Error(e.category(), "stage " + std::to_string(stage) + ": " + e.what());
}

// Runs stages [begin, end), all image-level, over every image.
LabeledDataset run_image_segment(const LabeledDataset& ds, const TransformPipeline& pipe,
                                 std::size_t begin, std::size_t end, std::size_t epoch) {
  if (ds.empty()) return ds;
  // Shape seen by each stage; corruption tables and permutations are fixed up front.
  std::vector<std::optional<PreparedCorruption>> prepared(end - begin);
  ImageShape shape = ds.shape();
  for (std::size_t s = begin; s < end; ++s) {
    try {
      if (const auto* c = std::get_if<CorruptionSpec>(&pipe.stages[s])) {
        prepared[s - begin].emplace(*c, shape);
      } else {
        const auto& aug = std::get<AugmentationSpec>(pipe.stages[s]);
        aug.validate();
        shape = augmented_shape(aug, shape);
      }
    } catch (const Error& e) {
      rethrow_with_stage(e, s);
    }
  }

  std::vector<ImageTensor> images(ds.size());
  parallel_for(ds.size(), [&](std::size_t i) {
    ImageTensor img = ds.image(i);
    const std::uint64_t image_seed = derive_seed(pipe.seed, i, epoch);
    for (std::size_t s = begin; s < end; ++s) {
      try {
        if (prepared[s - begin]) {
          img = prepared[s - begin]->apply(img);
        } else {
          Rng rng(derive_seed(image_seed, s));
          img = apply_augmentation(img, std::get<AugmentationSpec>(pipe.stages[s]), rng);
        }
      } catch (const Error& e) {
        rethrow_with_stage(e, s);
      }
    }
    images[i] = std::move(img);
  });
  return LabeledDataset(std::move(images), ds.labels(), ds.num_classes());
}

}  // namespace

const char* pipeline_mode_name(PipelineMode mode) noexcept {
  switch (mode) {
    case PipelineMode::kCorruptThenAugment: return "corrupt_then_augment";
    case PipelineMode::kAugmentThenCorrupt: return "augment_then_corrupt";
    case PipelineMode::kCustom: return "custom";
  }
  return "custom";
}

PipelineMode parse_pipeline_mode(std::string_view name) {
  if (name == "corrupt_then_augment") return PipelineMode::kCorruptThenAugment;
  if (name == "augment_then_corrupt") return PipelineMode::kAugmentThenCorrupt;
  if (name == "custom") return PipelineMode::kCustom;
  throw ConfigError("unknown pipeline mode '" + std::string(name) + "'");
}

TransformPipeline TransformPipeline::ordered(const std::vector<CorruptionSpec>& corruptions,
                                             const std::vector<AugmentationSpec>& augmentations,
                                             PipelineMode mode, std::uint64_t seed) {
  TransformPipeline p;
  p.mode = mode;
  p.seed = seed;
  auto add_corruptions = [&] {
    for (const auto& c : corruptions) p.stages.emplace_back(c);
  };
  auto add_augmentations = [&] {
    for (const auto& a : augmentations) p.stages.emplace_back(a);
  };
  if (mode == PipelineMode::kAugmentThenCorrupt) {
    add_augmentations();
    add_corruptions();
  } else {
    add_corruptions();
    add_augmentations();
  }
  return p;
}

LabeledDataset apply_pipeline(const LabeledDataset& ds, const TransformPipeline& pipe,
                              std::size_t epoch) {
  LabeledDataset current = ds;
  std::size_t s = 0;
  while (s < pipe.stages.size()) {
    if (!is_image_stage(pipe.stages[s])) {
      try {
        current = apply_corruption(current, std::get<CorruptionSpec>(pipe.stages[s]));
      } catch (const Error& e) {
        rethrow_with_stage(e, s);
      }
      ++s;
      continue;
    }
    std::size_t end = s;
    while (end < pipe.stages.size() && is_image_stage(pipe.stages[end])) ++end;
    current = run_image_segment(current, pipe, s, end, epoch);
    s = end;
  }
  return current;
}

// ---------------------------------------------------------------------------

bool is_corruption_name(std::string_view name) noexcept {
  return name == "gamma" || name == "global_shuffle" || name == "local_shuffle" ||
         name == "longtail" || name == "uniform_subsample" || name == "substitute";
}

bool is_augmentation_name(std::string_view name) noexcept {
  return name == "random_crop" || name == "hflip" || name == "color_jitter" ||
         name == "grayscale" || name == "resize";
}

CorruptionSpec parse_corruption(const CallExpr& call, std::uint64_t default_seed,
                                bool load_substitute) {
  CorruptionSpec spec;
  spec.seed = call.get_u64("seed", default_seed);
  spec.label = call.get_string("label", "");
  if (call.name == "gamma") {
    call.require_known({"gamma", "seed", "label"});
    if (!call.has("gamma")) throw ConfigError("gamma(...) requires gamma=");
    spec.kind = CorruptionKind::kGamma;
    spec.gamma = call.get_double("gamma", 1.0);
  } else if (call.name == "global_shuffle" || call.name == "local_shuffle") {
    call.require_known({"p", "seed", "label"});
    if (!call.has("p")) throw ConfigError(call.name + "(...) requires p=");
    spec.kind = call.name == "global_shuffle" ? CorruptionKind::kGlobalShuffle
                                              : CorruptionKind::kLocalShuffle;
    spec.patch = call.get_size("p", 1);
  } else if (call.name == "longtail") {
    call.require_known({"max", "min", "seed", "label"});
    if (!call.has("max") || !call.has("min")) throw ConfigError("longtail(...) requires max= and min=");
    spec.kind = CorruptionKind::kLongTailSubsample;
    spec.max_per_class = call.get_size("max", 0);
    spec.min_per_class = call.get_size("min", 0);
  } else if (call.name == "uniform_subsample") {
    call.require_known({"per_class", "seed", "label"});
    if (!call.has("per_class")) throw ConfigError("uniform_subsample(...) requires per_class=");
    spec.kind = CorruptionKind::kUniformSubsample;
    spec.per_class = call.get_size("per_class", 0);
  } else if (call.name == "substitute") {
    call.require_known({"path", "tolerance", "seed", "label"});
    if (!call.has("path")) throw ConfigError("substitute(...) requires path=");
    spec.kind = CorruptionKind::kDatasetSubstitute;
    spec.substitute_path = call.get_string("path", "");
    spec.count_tolerance = call.get_double("tolerance", 0.05);
    if (load_substitute) {
      spec.substitute = std::make_shared<const LabeledDataset>(load_dataset(spec.substitute_path));
    }
  } else {
    throw ConfigError("unknown corruption '" + call.name + "'");
  }
  if (spec.kind != CorruptionKind::kDatasetSubstitute || load_substitute) spec.validate();
  return spec;
}

AugmentationSpec parse_augmentation(const CallExpr& call) {
  AugmentationSpec spec;
  if (call.name == "random_crop") {
    call.require_known({"padding"});
    spec.kind = AugmentationKind::kRandomCrop;
    spec.padding = call.get_size("padding", 4);
  } else if (call.name == "hflip") {
    call.require_known({"prob"});
    spec.kind = AugmentationKind::kHorizontalFlip;
    spec.prob = call.get_double("prob", 0.5);
  } else if (call.name == "color_jitter") {
    call.require_known({"strength", "prob"});
    spec.kind = AugmentationKind::kColorJitter;
    spec.strength = call.get_double("strength", 0.4);
    spec.prob = call.get_double("prob", 0.8);
  } else if (call.name == "grayscale") {
    call.require_known({"prob"});
    spec.kind = AugmentationKind::kGrayscale;
    spec.prob = call.get_double("prob", 0.2);
  } else if (call.name == "resize") {
    call.require_known({"target"});
    spec.kind = AugmentationKind::kResize;
    spec.target = call.get_size("target", 224);
  } else {
    throw ConfigError("unknown augmentation '" + call.name + "'");
  }
  spec.validate();
  return spec;
}

PipelineStage parse_stage(const CallExpr& call, std::uint64_t default_seed, bool load_substitute) {
  if (is_corruption_name(call.name)) return parse_corruption(call, default_seed, load_substitute);
  if (is_augmentation_name(call.name)) return parse_augmentation(call);
  throw ConfigError("line " + std::to_string(call.line) + ": unknown stage kind '" + call.name + "'");
}

TransformPipeline parse_pipeline(std::string_view text, std::uint64_t seed) {
  const auto entries = parse_config_lines(text);
  TransformPipeline pipe;
  pipe.seed = seed;
  for (const auto& e : entries) {
    if (e.key == "seed") {
      pipe.seed = parse_u64_value(e.value, e.line);
    }
  }
  for (const auto& e : entries) {
    if (e.key == "stage") {
      const auto call = parse_call(e.value, e.line);
      pipe.stages.push_back(parse_stage(call, derive_seed(pipe.seed, pipe.stages.size())));
    } else if (e.key == "mode") {
      pipe.mode = parse_pipeline_mode(e.value);
    } else if (e.key != "seed") {
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
  }
  return pipe;
}

std::string format_corruption(const CorruptionSpec& spec) {
  std::vector<std::pair<std::string, std::string>> args;
  switch (spec.kind) {
    case CorruptionKind::kGamma: args.emplace_back("gamma", format_number(spec.gamma)); break;
    case CorruptionKind::kGlobalShuffle:
    case CorruptionKind::kLocalShuffle: args.emplace_back("p", std::to_string(spec.patch)); break;
    case CorruptionKind::kLongTailSubsample:
      args.emplace_back("max", std::to_string(spec.max_per_class));
      args.emplace_back("min", std::to_string(spec.min_per_class));
      break;
    case CorruptionKind::kUniformSubsample:
      args.emplace_back("per_class", std::to_string(spec.per_class));
      break;
    case CorruptionKind::kDatasetSubstitute:
      args.emplace_back("path", spec.substitute_path);
      args.emplace_back("tolerance", format_number(spec.count_tolerance));
      break;
  }
  args.emplace_back("seed", std::to_string(spec.seed));
  if (!spec.label.empty()) args.emplace_back("label", spec.label);
  return format_call(corruption_kind_name(spec.kind), args);
}

std::string format_augmentation(const AugmentationSpec& spec) {
  std::vector<std::pair<std::string, std::string>> args;
  switch (spec.kind) {
    case AugmentationKind::kRandomCrop: args.emplace_back("padding", std::to_string(spec.padding)); break;
    case AugmentationKind::kHorizontalFlip:
    case AugmentationKind::kGrayscale: args.emplace_back("prob", format_number(spec.prob)); break;
    case AugmentationKind::kColorJitter:
      args.emplace_back("strength", format_number(spec.strength));
      args.emplace_back("prob", format_number(spec.prob));
      break;
    case AugmentationKind::kResize: args.emplace_back("target", std::to_string(spec.target)); break;
  }
  return format_call(augmentation_kind_name(spec.kind), args);
}

std::string format_stage(const PipelineStage& stage) {
  if (const auto* c = std::get_if<CorruptionSpec>(&stage)) return format_corruption(*c);
  return format_augmentation(std::get<AugmentationSpec>(stage));
}

std::string format_pipeline(const TransformPipeline& pipe) {
  std::string out = "mode = " + std::string(pipeline_mode_name(pipe.mode)) + "\n";
  out += "seed = " + std::to_string(pipe.seed) + "\n";
  for (const auto& s : pipe.stages) out += "stage = " + format_stage(s) + "\n";
  return out;
}

}  // namespace corrupt_bench
