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

#ifndef CORRUPT_BENCH_MLP_HPP_
#define CORRUPT_BENCH_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corrupt_bench {

/// Row-major batch x width matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
};

/// Fully connected ReLU network [d_in, h1, ..., d_feat, num_classes].
///
/// All parameters live in one flat vector: for each layer l the weights
/// (in_l x out_l, row-major, so row i holds the fan-out of input unit i) then
/// the biases (out_l). The output of the last hidden layer is the feature
/// layer; with no hidden layer the features are the inputs.
class MlpModel {
 public:
  MlpModel() = default;
  /// All-zero parameters.
  explicit MlpModel(std::vector<std::size_t> layer_sizes);
  /// He-normal weights, zero biases.
  static MlpModel random(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t num_layers() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::size_t input_dim() const noexcept { return sizes_.front(); }
  std::size_t feature_dim() const noexcept { return sizes_[sizes_.size() - 2]; }
  std::size_t num_classes() const noexcept { return sizes_.back(); }

  std::span<const double> params() const noexcept { return params_; }
  std::span<double> mutable_params() noexcept { return params_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }
  double weight(std::size_t layer, std::size_t in, std::size_t out) const {
    return params_[weight_offset(layer) + in * sizes_[layer + 1] + out];
  }
  double& weight(std::size_t layer, std::size_t in, std::size_t out) {
    return params_[weight_offset(layer) + in * sizes_[layer + 1] + out];
  }
  double bias(std::size_t layer, std::size_t out) const { return params_[bias_offset(layer) + out]; }
  double& bias(std::size_t layer, std::size_t out) { return params_[bias_offset(layer) + out]; }

  bool operator==(const MlpModel&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

struct ForwardResult {
  Matrix features;  // batch x d_feat, before normalization
  Matrix logits;    // batch x num_classes
};

/// Throws ParameterError when the batch width differs from the input width.
ForwardResult forward(const MlpModel& model, const Matrix& batch);

/// Smoothing added to |h|^2 before the square root when normalizing features.
inline constexpr double kNormEpsilon = 1e-12;

struct LossResult {
  double loss = 0.0;        // ce - lambda * uniformity
  double ce = 0.0;          // mean softmax cross-entropy
  double uniformity = 0.0;  // batch uniformity of normalized features (0 when lambda == 0)
  std::vector<double> grad;  // same layout as MlpModel::params()
};

/// Batch uniformity -log mean_{i<j} exp(-2 |u_i - u_j|^2) with
/// u = h / sqrt(|h|^2 + kNormEpsilon). Requires at least 2 rows.
double batch_uniformity(const Matrix& features);

/// Loss CE - lambda * U_batch and its gradient by full backprop, including the
/// pairwise potential and the feature normalization. Positive lambda rewards
/// spread-out features. Throws ConfigError for a 1-row batch with lambda != 0.
LossResult loss_and_grad(const MlpModel& model, const Matrix& batch,
                         std::span<const std::uint32_t> labels, double lambda);
/// Loss only; same value as loss_and_grad(...).loss.
double loss_value(const MlpModel& model, const Matrix& batch, std::span<const std::uint32_t> labels,
                  double lambda);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_MLP_HPP_
