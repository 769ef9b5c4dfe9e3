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

#ifndef CORRUPT_BENCH_IMAGE_HPP_
#define CORRUPT_BENCH_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corrupt_bench {

/// Image shape. Layout is row-major with interleaved channels: (y, x, c).
struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const noexcept { return height * width * channels; }
  bool operator==(const ImageShape&) const = default;
};

/// H x W x C unsigned 8-bit pixels, channel-interleaved rows.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(ImageShape shape, std::vector<std::uint8_t> data);
  /// Zero-filled image.
  explicit ImageTensor(ImageShape shape);

  const ImageShape& shape() const noexcept { return shape_; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t channels() const noexcept { return shape_.channels; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> mutable_data() noexcept { return data_; }

  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return (y * shape_.width + x) * shape_.channels + c;
  }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return data_[index(y, x, c)];
  }
  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) noexcept {
    return data_[index(y, x, c)];
  }

  bool operator==(const ImageTensor&) const = default;

 private:
  ImageShape shape_;
  std::vector<std::uint8_t> data_;
};

/// Per-class sample counts.
struct ClassProfile {
  std::vector<std::size_t> counts;

  std::size_t total() const noexcept;
  /// Throws DegenerateInputError if any count is zero.
  void validate() const;
  bool operator==(const ClassProfile&) const = default;
};

/// Ordered (image, label) pairs sharing one shape.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Validates: equal lengths, labels < num_classes, uniform image shape.
  LabeledDataset(std::vector<ImageTensor> images, std::vector<std::uint32_t> labels,
                 std::size_t num_classes);

  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  /// Shape of every image; all-zero for an empty dataset.
  ImageShape shape() const noexcept;

  const std::vector<ImageTensor>& images() const noexcept { return images_; }
  const std::vector<std::uint32_t>& labels() const noexcept { return labels_; }
  const ImageTensor& image(std::size_t i) const { return images_[i]; }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }

  /// Label histogram of length num_classes (may contain zeros).
  std::vector<std::size_t> label_histogram() const;
  /// Histogram as a profile; throws if any class is absent.
  ClassProfile class_profile() const;

  bool operator==(const LabeledDataset&) const = default;

 private:
  std::vector<ImageTensor> images_;
  std::vector<std::uint32_t> labels_;
  std::size_t num_classes_ = 0;
};

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_IMAGE_HPP_
