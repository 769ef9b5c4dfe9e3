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

#include "corrupt_bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

struct Prototype {
  std::vector<double> pixels;  // side x side x channels
};

Prototype make_prototype(const SyntheticSpec& spec, std::uint32_t cls, std::size_t mode) {
  Rng rng(derive_seed(derive_seed(spec.seed, 0x70726f74ULL, cls), mode));
  const std::size_t s = spec.side;
  const std::size_t c = spec.channels;
  Prototype p{std::vector<double>(s * s * c)};
  std::vector<double> tint(c);
  for (auto& t : tint) t = rng.uniform(70.0, 180.0);
  for (std::size_t k = 0; k < s * s; ++k) {
    for (std::size_t ch = 0; ch < c; ++ch) p.pixels[k * c + ch] = tint[ch];
  }
  const double side = static_cast<double>(s);
  for (std::size_t b = 0; b < spec.blobs_per_class; ++b) {
    const double cy = rng.uniform(0.0, side);
    const double cx = rng.uniform(0.0, side);
    const double sigma = rng.uniform(side / 10.0, side / 4.0);
    std::vector<double> amp(c);
    for (auto& a : amp) a = rng.uniform(-110.0, 110.0);
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        const double g = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
        for (std::size_t ch = 0; ch < c; ++ch) p.pixels[(y * s + x) * c + ch] += amp[ch] * g;
      }
    }
  }
  return p;
}

ImageTensor make_sample(const SyntheticSpec& spec, const Prototype& proto, Rng& rng) {
  const std::size_t s = spec.side;
  const std::size_t c = spec.channels;
  const auto shift = static_cast<std::ptrdiff_t>(spec.max_shift);
  const std::ptrdiff_t dy =
      static_cast<std::ptrdiff_t>(rng.uniform_index(2 * spec.max_shift + 1)) - shift;
  const std::ptrdiff_t dx =
      static_cast<std::ptrdiff_t>(rng.uniform_index(2 * spec.max_shift + 1)) - shift;
  const double bright = rng.uniform(1.0 - spec.brightness_jitter, 1.0 + spec.brightness_jitter);
  ImageTensor img(ImageShape{s, s, c});
  const auto last = static_cast<std::ptrdiff_t>(s) - 1;
  for (std::size_t y = 0; y < s; ++y) {
    const auto sy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(y) + dy, 0, last));
    for (std::size_t x = 0; x < s; ++x) {
      const auto sx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
          static_cast<std::ptrdiff_t>(x) + dx, 0, last));
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double v = proto.pixels[(sy * s + sx) * c + ch] * bright + spec.noise * rng.normal();
        img.at(y, x, ch) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return img;
}

// protos[cls * modes_per_class + mode]
LabeledDataset make_split(const SyntheticSpec& spec, const std::vector<Prototype>& protos,
                          std::size_t count, std::uint64_t split) {
  std::vector<ImageTensor> images;
  std::vector<std::uint32_t> labels;
  images.reserve(count);
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto cls = static_cast<std::uint32_t>(i % spec.num_classes);
    Rng rng(derive_seed(spec.seed, split, i));
    const std::size_t mode = spec.modes_per_class > 1 ? rng.uniform_index(spec.modes_per_class) : 0;
    images.push_back(make_sample(spec, protos[cls * spec.modes_per_class + mode], rng));
    labels.push_back(cls);
  }
  return LabeledDataset(std::move(images), std::move(labels), spec.num_classes);
}

}  // namespace

SyntheticSplits make_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1) throw ParameterError("synthetic fixture needs at least one class");
  if (spec.side < 1) throw ParameterError("synthetic image side must be >= 1");
  if (spec.channels != 1 && spec.channels != 3) {
    throw ParameterError("synthetic channels must be 1 or 3");
  }
  if (spec.modes_per_class < 1) throw ParameterError("synthetic classes need at least one mode");
  std::vector<Prototype> protos;
  protos.reserve(spec.num_classes * spec.modes_per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t m = 0; m < spec.modes_per_class; ++m) {
      protos.push_back(make_prototype(spec, static_cast<std::uint32_t>(c), m));
    }
  }
  return SyntheticSplits{make_split(spec, protos, spec.train_size, 1),
                         make_split(spec, protos, spec.test_size, 2)};
}

BlobFeatures make_blob_features(std::size_t per_class, std::size_t dim, double separation,
                                double spread, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("blob dimension must be >= 1");
  BlobFeatures b;
  b.rows = 2 * per_class;
  b.dim = dim;
  b.features.resize(b.rows * dim);
  b.labels.resize(b.rows);
  Rng rng(seed);
  for (std::size_t i = 0; i < b.rows; ++i) {
    const std::uint32_t cls = static_cast<std::uint32_t>(i % 2);
    b.labels[i] = cls;
    for (std::size_t j = 0; j < dim; ++j) {
      double v = spread * rng.normal();
      if (j == 0) v += cls == 0 ? -separation / 2.0 : separation / 2.0;
      b.features[i * dim + j] = static_cast<float>(v);
    }
  }
  return b;
}

}  // namespace corrupt_bench
