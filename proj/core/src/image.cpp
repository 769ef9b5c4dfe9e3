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

#include "corrupt_bench/image.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "corrupt_bench/error.hpp"

namespace corrupt_bench {

ImageTensor::ImageTensor(ImageShape shape, std::vector<std::uint8_t> data)
    : shape_(shape), data_(std::move(data)) {
  if (shape_.channels != 1 && shape_.channels != 3) {
    throw ParameterError("image channels must be 1 or 3, got " + std::to_string(shape_.channels));
  }
  if (data_.size() != shape_.size()) {
    throw ParameterError("image data length " + std::to_string(data_.size()) + " != H*W*C = " +
                         std::to_string(shape_.size()));
  }
}

ImageTensor::ImageTensor(ImageShape shape)
    : ImageTensor(shape, std::vector<std::uint8_t>(shape.size(), 0)) {}

std::size_t ClassProfile::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

void ClassProfile::validate() const {
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DegenerateInputError("class profile has zero count for class " + std::to_string(c));
    }
  }
}

LabeledDataset::LabeledDataset(std::vector<ImageTensor> images, std::vector<std::uint32_t> labels,
                               std::size_t num_classes)
    : images_(std::move(images)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (images_.size() != labels_.size()) {
    throw FormatError("dataset has " + std::to_string(images_.size()) + " images but " +
                      std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= num_classes_) {
      throw FormatError("label " + std::to_string(labels_[i]) + " at index " + std::to_string(i) +
                        " >= num_classes " + std::to_string(num_classes_));
    }
  }
  for (std::size_t i = 1; i < images_.size(); ++i) {
    if (!(images_[i].shape() == images_[0].shape())) {
      throw FormatError("image " + std::to_string(i) + " shape differs from image 0");
    }
  }
}

ImageShape LabeledDataset::shape() const noexcept {
  return images_.empty() ? ImageShape{} : images_.front().shape();
}

std::vector<std::size_t> LabeledDataset::label_histogram() const {
  std::vector<std::size_t> hist(num_classes_, 0);
  for (auto l : labels_) ++hist[l];
  return hist;
}

ClassProfile LabeledDataset::class_profile() const {
  ClassProfile p{label_histogram()};
  p.validate();
  return p;
}

}  // namespace corrupt_bench
