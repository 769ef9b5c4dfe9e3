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

#include "corrupt_bench/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "corrupt_bench/error.hpp"

namespace corrupt_bench {
namespace {

std::uint8_t to_pixel(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Mirror index into [0, n) without repeating the edge: -1 -> 1, n -> n - 2.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  if (m == 1) return 0;
  const std::ptrdiff_t period = 2 * (m - 1);
  std::ptrdiff_t r = i % period;
  if (r < 0) r += period;
  return static_cast<std::size_t>(r < m ? r : period - r);
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace

const char* augmentation_kind_name(AugmentationKind kind) noexcept {
  switch (kind) {
    case AugmentationKind::kRandomCrop: return "random_crop";
    case AugmentationKind::kHorizontalFlip: return "hflip";
    case AugmentationKind::kColorJitter: return "color_jitter";
    case AugmentationKind::kGrayscale: return "grayscale";
    case AugmentationKind::kResize: return "resize";
  }
  return "unknown";
}

void AugmentationSpec::validate() const {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ParameterError("augmentation probability must be in [0, 1]");
  }
  if (!(strength >= 0.0)) throw ParameterError("color jitter strength must be >= 0");
  if (kind == AugmentationKind::kResize && target == 0) {
    throw ParameterError("resize target must be >= 1");
  }
}

ImageTensor random_crop(const ImageTensor& img, std::size_t padding, Rng& rng) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  if (padding == 0) return img;
  if (padding >= h || padding >= w) {
    throw ParameterError("crop padding " + std::to_string(padding) + " must be smaller than the image");
  }
  const auto oy = static_cast<std::ptrdiff_t>(rng.uniform_index(2 * padding + 1)) -
                  static_cast<std::ptrdiff_t>(padding);
  const auto ox = static_cast<std::ptrdiff_t>(rng.uniform_index(2 * padding + 1)) -
                  static_cast<std::ptrdiff_t>(padding);
  ImageTensor out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t sy = reflect(static_cast<std::ptrdiff_t>(y) + oy, h);
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t sx = reflect(static_cast<std::ptrdiff_t>(x) + ox, w);
      for (std::size_t c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

ImageTensor horizontal_flip(const ImageTensor& img) {
  ImageTensor out(img.shape());
  const std::size_t w = img.width();
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < img.channels(); ++c) out.at(y, w - 1 - x, c) = img.at(y, x, c);
    }
  }
  return out;
}

ImageTensor color_jitter(const ImageTensor& img, double strength, double prob, Rng& rng) {
  // Factors are drawn even when the jitter is skipped so the stream position
  // does not depend on the coin flip.
  const bool apply = rng.bernoulli(prob);
  const double brightness = rng.uniform(std::max(0.0, 1.0 - strength), 1.0 + strength);
  const double contrast = rng.uniform(std::max(0.0, 1.0 - strength), 1.0 + strength);
  const double saturation = rng.uniform(std::max(0.0, 1.0 - strength), 1.0 + strength);
  if (!apply || strength == 0.0) return img;

  ImageTensor out = img;
  auto px = out.mutable_data();
  const std::size_t c = img.channels();
  const std::size_t n = img.height() * img.width();

  for (auto& v : px) v = to_pixel(v * brightness);

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += c == 3 ? luma(px[3 * i], px[3 * i + 1], px[3 * i + 2]) : px[i];
  }
  mean /= static_cast<double>(n);
  for (auto& v : px) v = to_pixel(mean + contrast * (v - mean));

  if (c == 3) {
    for (std::size_t i = 0; i < n; ++i) {
      const double gray = luma(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
      for (std::size_t ch = 0; ch < 3; ++ch) {
        px[3 * i + ch] = to_pixel(gray + saturation * (px[3 * i + ch] - gray));
      }
    }
  }
  return out;
}

ImageTensor to_grayscale(const ImageTensor& img) {
  if (img.channels() != 3) return img;
  ImageTensor out(img.shape());
  auto dst = out.mutable_data();
  const auto src = img.data();
  for (std::size_t i = 0; i < img.height() * img.width(); ++i) {
    const std::uint8_t g = to_pixel(luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]));
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = g;
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& img, std::size_t target) {
  if (target == 0) throw ParameterError("resize target must be >= 1");
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t c = img.channels();
  if (h == target && w == target) return img;
  ImageTensor out(ImageShape{target, target, c});
  const double sy = static_cast<double>(h) / static_cast<double>(target);
  const double sx = static_cast<double>(w) / static_cast<double>(target);
  for (std::size_t y = 0; y < target; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const std::size_t y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < target; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const std::size_t x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double top = img.at(y0, x0, ch) * (1.0 - tx) + img.at(y0, x1, ch) * tx;
        const double bot = img.at(y1, x0, ch) * (1.0 - tx) + img.at(y1, x1, ch) * tx;
        out.at(y, x, ch) = to_pixel(top * (1.0 - ty) + bot * ty);
      }
    }
  }
  return out;
}

ImageShape augmented_shape(const AugmentationSpec& spec, const ImageShape& in) {
  if (spec.kind == AugmentationKind::kResize) return ImageShape{spec.target, spec.target, in.channels};
  return in;
}

ImageTensor apply_augmentation(const ImageTensor& img, const AugmentationSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case AugmentationKind::kRandomCrop: return random_crop(img, spec.padding, rng);
    case AugmentationKind::kHorizontalFlip:
      return rng.bernoulli(spec.prob) ? horizontal_flip(img) : img;
    case AugmentationKind::kColorJitter: return color_jitter(img, spec.strength, spec.prob, rng);
    case AugmentationKind::kGrayscale: return rng.bernoulli(spec.prob) ? to_grayscale(img) : img;
    case AugmentationKind::kResize: return resize_bilinear(img, spec.target);
  }
  return img;
}

}  // namespace corrupt_bench
