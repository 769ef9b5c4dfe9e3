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

#include "corrupt_bench/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>

#include "corrupt_bench/error.hpp"

namespace corrupt_bench {
namespace fs = std::filesystem;

namespace {

constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kEmbHeaderBytes = 4 + 4 + 4 + 1;
constexpr std::size_t kRawHeaderBytes = 12;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[at + b]) << (8 * b);
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffULL) throw FormatError(std::string(what) + " exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  if (path.empty()) throw IoError("empty path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.empty()) throw IoError("empty path");
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move temporary file onto " + path.string());
  }
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary

LabeledDataset decode_cifar_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw FormatError("CIFAR file size " + std::to_string(bytes.size()) +
                      " is not a multiple of " + std::to_string(kCifarRecordBytes));
  }
  const std::size_t n = bytes.size() / kCifarRecordBytes;
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  const ImageShape shape{kCifarSide, kCifarSide, 3};

  std::vector<ImageTensor> images;
  std::vector<std::uint32_t> labels;
  images.reserve(n);
  labels.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::uint8_t* rec = bytes.data() + r * kCifarRecordBytes;
    if (rec[0] >= kCifarClasses) {
      throw FormatError("record " + std::to_string(r) + " has label byte " +
                        std::to_string(rec[0]));
    }
    labels.push_back(rec[0]);
    std::vector<std::uint8_t> px(shape.size());
    const std::uint8_t* planes = rec + 1;
    for (std::size_t k = 0; k < plane; ++k) {
      px[3 * k + 0] = planes[k];
      px[3 * k + 1] = planes[plane + k];
      px[3 * k + 2] = planes[2 * plane + k];
    }
    images.emplace_back(shape, std::move(px));
  }
  return LabeledDataset(std::move(images), std::move(labels), kCifarClasses);
}

LabeledDataset read_cifar_binary(const fs::path& path) {
  return decode_cifar_binary(read_file_bytes(path));
}

std::vector<std::uint8_t> encode_cifar_binary(const LabeledDataset& ds) {
  if (!ds.empty() && !(ds.shape() == ImageShape{kCifarSide, kCifarSide, 3})) {
    throw CompatibilityError("CIFAR binary requires 32x32x3 images");
  }
  if (ds.num_classes() > kCifarClasses) {
    throw CompatibilityError("CIFAR binary supports at most 10 classes");
  }
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  std::vector<std::uint8_t> out(ds.size() * kCifarRecordBytes);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::uint8_t* rec = out.data() + r * kCifarRecordBytes;
    rec[0] = static_cast<std::uint8_t>(ds.label(r));
    const auto px = ds.image(r).data();
    for (std::size_t k = 0; k < plane; ++k) {
      rec[1 + k] = px[3 * k + 0];
      rec[1 + plane + k] = px[3 * k + 1];
      rec[1 + 2 * plane + k] = px[3 * k + 2];
    }
  }
  return out;
}

void write_cifar_binary(const LabeledDataset& ds, const fs::path& path) {
  write_file_bytes(path, encode_cifar_binary(ds));
}

// ---------------------------------------------------------------------------
// EMB1

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set) {
  const std::size_t n = set.rows();
  const std::size_t d = set.dim();
  std::vector<std::uint8_t> out;
  out.reserve(kEmbHeaderBytes + 4 * n * d + 4 * n);
  out.insert(out.end(), std::begin(kEmbMagic), std::end(kEmbMagic));
  put_u32(out, checked_u32(n, "row count"));
  put_u32(out, checked_u32(d, "dimension"));
  out.push_back(set.normalized() ? 1 : 0);
  for (float v : set.features()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (auto l : set.labels()) put_u32(out, l);
  return out;
}

EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEmbHeaderBytes) throw FormatError("embedding file truncated in header");
  if (!std::equal(std::begin(kEmbMagic), std::end(kEmbMagic), bytes.begin())) {
    throw FormatError("bad embedding magic (expected EMB1)");
  }
  const std::size_t n = get_u32(bytes, 4);
  const std::size_t d = get_u32(bytes, 8);
  const std::uint8_t flag = bytes[12];
  if (flag > 1) throw FormatError("normalized flag must be 0 or 1");
  const std::size_t expected = kEmbHeaderBytes + 4 * n * d + 4 * n;
  if (bytes.size() < expected) {
    throw FormatError("embedding payload truncated: " + std::to_string(bytes.size()) + " < " +
                      std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) throw FormatError("trailing bytes after embedding payload");

  std::vector<float> features(n * d);
  std::size_t at = kEmbHeaderBytes;
  for (auto& v : features) {
    v = std::bit_cast<float>(get_u32(bytes, at));
    at += 4;
  }
  std::vector<std::uint32_t> labels(n);
  for (auto& l : labels) {
    l = get_u32(bytes, at);
    at += 4;
  }
  return EmbeddingSet(n, d, std::move(features), std::move(labels), flag == 1);
}

void write_embeddings(const EmbeddingSet& set, const fs::path& path) {
  write_file_bytes(path, encode_embeddings(set));
}

EmbeddingSet read_embeddings(const fs::path& path) {
  return decode_embeddings(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// Raw image directory

LabeledDataset read_raw_image_dir(const fs::path& dir, std::size_t num_classes) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");

  std::map<std::string, std::uint32_t> label_of;
  {
    std::ifstream csv(dir / kRawLabelsFile);
    if (!csv) throw IoError("missing " + (dir / kRawLabelsFile).string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(csv, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) {
        throw FormatError("labels.csv line " + std::to_string(lineno) + " has no comma");
      }
      const std::string name = line.substr(0, comma);
      const std::string value = line.substr(comma + 1);
      if (name == "filename" && lineno == 1) continue;  // optional header row
      std::uint32_t label = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), label);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw FormatError("labels.csv line " + std::to_string(lineno) + ": bad label '" + value +
                          "'");
      }
      label_of[name] = label;
    }
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == kRawLabelsFile) continue;
    files.push_back(name);
  }
  std::sort(files.begin(), files.end());

  std::vector<ImageTensor> images;
  std::vector<std::uint32_t> labels;
  std::uint32_t max_label = 0;
  for (const auto& name : files) {
    const auto it = label_of.find(name);
    if (it == label_of.end()) throw FormatError("no label for image file " + name);
    const auto bytes = read_file_bytes(dir / name);
    if (bytes.size() < kRawHeaderBytes) throw FormatError(name + ": truncated header");
    const ImageShape shape{get_u32(bytes, 0), get_u32(bytes, 4), get_u32(bytes, 8)};
    if (bytes.size() != kRawHeaderBytes + shape.size()) {
      throw FormatError(name + ": payload length does not match header H*W*C");
    }
    images.emplace_back(shape, std::vector<std::uint8_t>(bytes.begin() + kRawHeaderBytes,
                                                         bytes.end()));
    labels.push_back(it->second);
    max_label = std::max(max_label, it->second);
  }
  if (label_of.size() != files.size()) {
    throw FormatError("labels.csv lists files that are not present in " + dir.string());
  }
  const std::size_t classes =
      num_classes != 0 ? num_classes : (labels.empty() ? 0 : static_cast<std::size_t>(max_label) + 1);
  return LabeledDataset(std::move(images), std::move(labels), classes);
}

void write_raw_image_dir(const LabeledDataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  std::ostringstream csv;
  csv << "filename,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%06zu.raw", i);
    const auto& img = ds.image(i);
    std::vector<std::uint8_t> bytes;
    bytes.reserve(kRawHeaderBytes + img.shape().size());
    put_u32(bytes, checked_u32(img.height(), "height"));
    put_u32(bytes, checked_u32(img.width(), "width"));
    put_u32(bytes, checked_u32(img.channels(), "channels"));
    bytes.insert(bytes.end(), img.data().begin(), img.data().end());
    write_file_bytes(dir / name, bytes);
    csv << name << ',' << ds.label(i) << '\n';
  }
  const std::string text = csv.str();
  write_file_bytes(dir / kRawLabelsFile,
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

LabeledDataset load_dataset(const fs::path& path) {
  if (fs::is_directory(path)) return read_raw_image_dir(path);
  return read_cifar_binary(path);
}

void save_dataset(const LabeledDataset& ds, const fs::path& path) {
  if (path.extension() == ".bin") {
    write_cifar_binary(ds, path);
  } else {
    write_raw_image_dir(ds, path);
  }
}

}  // namespace corrupt_bench
