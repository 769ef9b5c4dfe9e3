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

#ifndef CORRUPT_BENCH_DATASET_IO_HPP_
#define CORRUPT_BENCH_DATASET_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "corrupt_bench/embedding.hpp"
#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

// CIFAR-10 binary: records of 1 label byte + 3 x 1024 channel planes (R, G, B),
// each plane row-major 32x32.
inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarSide * kCifarSide;
inline constexpr std::size_t kCifarClasses = 10;

LabeledDataset decode_cifar_binary(std::span<const std::uint8_t> bytes);
LabeledDataset read_cifar_binary(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_cifar_binary(const LabeledDataset& ds);
/// Requires 32x32x3 images and at most 10 classes.
void write_cifar_binary(const LabeledDataset& ds, const std::filesystem::path& path);

// "EMB1" embedding format, little-endian:
//   magic "EMB1" | u32 N | u32 D | u8 normalized | N*D f32 row-major | N u32 labels
std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

// Raw image directory: one file per image with a `u32 H, u32 W, u32 C`
// little-endian header then H*W*C bytes; labels in `labels.csv` as
// `filename,label`. Lexicographic filename order is dataset order.
inline constexpr const char* kRawLabelsFile = "labels.csv";

/// Loads `dir`. num_classes is max(label)+1 unless `num_classes` is nonzero.
LabeledDataset read_raw_image_dir(const std::filesystem::path& dir, std::size_t num_classes = 0);
/// Writes images as `img_000000.raw`, ... plus labels.csv. Creates `dir`.
void write_raw_image_dir(const LabeledDataset& ds, const std::filesystem::path& dir);

/// A directory is read as a raw image dir, anything else as CIFAR binary.
LabeledDataset load_dataset(const std::filesystem::path& path);
/// `.bin` targets are written as CIFAR binary, anything else as a raw image dir.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
/// Writes to a sibling temporary file then renames, so a failed write leaves
/// no partial target.
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_DATASET_IO_HPP_
