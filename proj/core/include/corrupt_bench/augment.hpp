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

#ifndef CORRUPT_BENCH_AUGMENT_HPP_
#define CORRUPT_BENCH_AUGMENT_HPP_

#include <cstddef>
#include <string>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

enum class AugmentationKind { kRandomCrop, kHorizontalFlip, kColorJitter, kGrayscale, kResize };

const char* augmentation_kind_name(AugmentationKind kind) noexcept;

/// Per-image random augmentation. Only the fields relevant to `kind` are read.
struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::kRandomCrop;
  std::size_t padding = 4;   // kRandomCrop
  double prob = 0.5;         // kHorizontalFlip, kColorJitter, kGrayscale
  double strength = 0.4;     // kColorJitter
  std::size_t target = 224;  // kResize

  void validate() const;
};

/// Reflect-pads by `padding` (edge pixel not repeated) then takes a random
/// window of the original size.
ImageTensor random_crop(const ImageTensor& img, std::size_t padding, Rng& rng);
ImageTensor horizontal_flip(const ImageTensor& img);
/// Brightness, contrast, then saturation, each an affine blend with a factor
/// drawn from [1 - strength, 1 + strength]. Applied with probability `prob`.
ImageTensor color_jitter(const ImageTensor& img, double strength, double prob, Rng& rng);
/// ITU-R 601 luma replicated to every channel.
ImageTensor to_grayscale(const ImageTensor& img);
/// Bilinear resize (half-pixel centers) to target x target.
ImageTensor resize_bilinear(const ImageTensor& img, std::size_t target);

/// Shape produced by `spec` applied to an image of shape `in`.
ImageShape augmented_shape(const AugmentationSpec& spec, const ImageShape& in);
ImageTensor apply_augmentation(const ImageTensor& img, const AugmentationSpec& spec, Rng& rng);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_AUGMENT_HPP_
