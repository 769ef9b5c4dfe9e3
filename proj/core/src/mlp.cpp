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

#include "corrupt_bench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

struct Activations {
  // acts[l] is the input of layer l; acts[L] holds the logits.
  std::vector<Matrix> acts;
};

Activations run_forward(const MlpModel& m, const Matrix& x) {
  if (x.cols != m.input_dim()) {
    throw ParameterError("batch width " + std::to_string(x.cols) + " != model input " +
                         std::to_string(m.input_dim()));
  }
  const std::size_t layers = m.num_layers();
  const auto& sizes = m.layer_sizes();
  const auto params = m.params();
  Activations a;
  a.acts.reserve(layers + 1);
  a.acts.push_back(x);
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& in = a.acts[l];
    const std::size_t n_in = sizes[l];
    const std::size_t n_out = sizes[l + 1];
    const double* w = params.data() + m.weight_offset(l);
    const double* b = params.data() + m.bias_offset(l);
    Matrix out(in.rows, n_out);
    for (std::size_t r = 0; r < in.rows; ++r) {
      double* z = out.data.data() + r * n_out;
      std::copy(b, b + n_out, z);
      const double* xr = in.data.data() + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const double v = xr[i];
        if (v == 0.0) continue;
        const double* wi = w + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) z[o] += v * wi[o];
      }
      if (l + 1 < layers) {
        for (std::size_t o = 0; o < n_out; ++o) z[o] = z[o] > 0.0 ? z[o] : 0.0;
      }
    }
    a.acts.push_back(std::move(out));
  }
  return a;
}

double mean_cross_entropy(const Matrix& logits, std::span<const std::uint32_t> labels,
                          Matrix* dlogits) {
  const std::size_t b = logits.rows;
  const std::size_t c = logits.cols;
  double total = 0.0;
  std::vector<double> p(c);
  for (std::size_t r = 0; r < b; ++r) {
    const double* z = logits.data.data() + r * c;
    const double peak = *std::max_element(z, z + c);
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      p[k] = std::exp(z[k] - peak);
      sum += p[k];
    }
    total += std::log(sum) + peak - z[labels[r]];
    if (dlogits) {
      for (std::size_t k = 0; k < c; ++k) {
        dlogits->at(r, k) = (p[k] / sum - (k == labels[r] ? 1.0 : 0.0)) / static_cast<double>(b);
      }
    }
  }
  return total / static_cast<double>(b);
}

struct UnitRows {
  Matrix unit;
  std::vector<double> norm;
};

UnitRows normalize_rows(const Matrix& h) {
  UnitRows u{Matrix(h.rows, h.cols), std::vector<double>(h.rows)};
  for (std::size_t r = 0; r < h.rows; ++r) {
    double sq = 0.0;
    for (std::size_t k = 0; k < h.cols; ++k) sq += h.at(r, k) * h.at(r, k);
    const double n = std::sqrt(sq + kNormEpsilon);
    u.norm[r] = n;
    for (std::size_t k = 0; k < h.cols; ++k) u.unit.at(r, k) = h.at(r, k) / n;
  }
  return u;
}

// Pair potentials w_ij = exp(-2 |u_i - u_j|^2) for i < j, row-major upper triangle.
double potential_sum(const Matrix& u, Matrix* w) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.rows; ++i) {
    for (std::size_t j = i + 1; j < u.rows; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < u.cols; ++k) {
        const double diff = u.at(i, k) - u.at(j, k);
        d2 += diff * diff;
      }
      const double v = std::exp(-2.0 * d2);
      if (w) w->at(i, j) = v;
      total += v;
    }
  }
  return total;
}

void check_batch(const Matrix& batch, std::span<const std::uint32_t> labels, double lambda,
                 std::size_t classes) {
  if (labels.size() != batch.rows) throw ParameterError("label count differs from batch rows");
  if (batch.rows == 0) throw ParameterError("empty batch");
  if (lambda != 0.0 && batch.rows < 2) {
    throw ConfigError("uniformity regularization needs a batch of at least 2");
  }
  for (auto l : labels) {
    if (l >= classes) throw ParameterError("label exceeds model class count");
  }
}

}  // namespace

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ParameterError("MLP needs at least input and output sizes");
  for (auto s : sizes_) {
    if (s == 0) throw ParameterError("MLP layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

MlpModel MlpModel::random(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  MlpModel m(std::move(layer_sizes));
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    Rng rng(derive_seed(seed, l));
    const std::size_t n_in = m.sizes_[l];
    const double scale = std::sqrt(2.0 / static_cast<double>(n_in));
    const std::size_t count = n_in * m.sizes_[l + 1];
    for (std::size_t k = 0; k < count; ++k) m.params_[m.offsets_[l] + k] = scale * rng.normal();
  }
  return m;
}

ForwardResult forward(const MlpModel& model, const Matrix& batch) {
  Activations a = run_forward(model, batch);
  ForwardResult r;
  r.logits = std::move(a.acts.back());
  r.features = std::move(a.acts[model.num_layers() - 1]);
  return r;
}

double batch_uniformity(const Matrix& features) {
  if (features.rows < 2) throw InsufficientDataError("batch uniformity needs at least 2 rows");
  const UnitRows u = normalize_rows(features);
  const double pairs = static_cast<double>(features.rows * (features.rows - 1) / 2);
  return -std::log(potential_sum(u.unit, nullptr) / pairs);
}

double loss_value(const MlpModel& model, const Matrix& batch, std::span<const std::uint32_t> labels,
                  double lambda) {
  check_batch(batch, labels, lambda, model.num_classes());
  const ForwardResult f = forward(model, batch);
  double loss = mean_cross_entropy(f.logits, labels, nullptr);
  if (lambda != 0.0) loss -= lambda * batch_uniformity(f.features);
  return loss;
}

LossResult loss_and_grad(const MlpModel& model, const Matrix& batch,
                         std::span<const std::uint32_t> labels, double lambda) {
  check_batch(batch, labels, lambda, model.num_classes());
  const std::size_t layers = model.num_layers();
  const auto& sizes = model.layer_sizes();
  const auto params = model.params();
  const std::size_t bsz = batch.rows;

  Activations a = run_forward(model, batch);
  LossResult out;
  out.grad.assign(params.size(), 0.0);

  Matrix delta(bsz, model.num_classes());
  out.ce = mean_cross_entropy(a.acts[layers], labels, &delta);
  out.loss = out.ce;

  // Gradient of -lambda * U with respect to the feature layer.
  Matrix feature_grad;
  if (lambda != 0.0) {
    const Matrix& h = a.acts[layers - 1];
    const UnitRows u = normalize_rows(h);
    Matrix w(bsz, bsz);
    const double pairs = static_cast<double>(bsz * (bsz - 1) / 2);
    const double mean_potential = potential_sum(u.unit, &w) / pairs;
    out.uniformity = -std::log(mean_potential);
    out.loss -= lambda * out.uniformity;

    // dU/du_i = 4 / (P * G) * sum_{j != i} w_ij (u_i - u_j)
    const double coef = 4.0 / (pairs * mean_potential);
    Matrix du(bsz, h.cols);
    for (std::size_t i = 0; i < bsz; ++i) {
      for (std::size_t j = i + 1; j < bsz; ++j) {
        const double s = coef * w.at(i, j);
        for (std::size_t k = 0; k < h.cols; ++k) {
          const double diff = s * (u.unit.at(i, k) - u.unit.at(j, k));
          du.at(i, k) += diff;
          du.at(j, k) -= diff;
        }
      }
    }
    // Through u = h / n with n = sqrt(|h|^2 + eps): dU/dh = g/n - h (h.g) / n^3.
    feature_grad = Matrix(bsz, h.cols);
    for (std::size_t i = 0; i < bsz; ++i) {
      double hg = 0.0;
      for (std::size_t k = 0; k < h.cols; ++k) hg += h.at(i, k) * du.at(i, k);
      const double n = u.norm[i];
      for (std::size_t k = 0; k < h.cols; ++k) {
        const double du_dh = du.at(i, k) / n - h.at(i, k) * hg / (n * n * n);
        feature_grad.at(i, k) = -lambda * du_dh;
      }
    }
  }

  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& in = a.acts[l];
    const std::size_t n_in = sizes[l];
    const std::size_t n_out = sizes[l + 1];
    double* gw = out.grad.data() + model.weight_offset(l);
    double* gb = out.grad.data() + model.bias_offset(l);
    for (std::size_t r = 0; r < bsz; ++r) {
      const double* d = delta.data.data() + r * n_out;
      for (std::size_t o = 0; o < n_out; ++o) gb[o] += d[o];
      const double* xr = in.data.data() + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const double v = xr[i];
        if (v == 0.0) continue;
        double* gwi = gw + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) gwi[o] += v * d[o];
      }
    }
    if (l == 0) break;

    // Gradient with respect to this layer's input (a ReLU output).
    const double* w = params.data() + model.weight_offset(l);
    Matrix prev(bsz, n_in);
    for (std::size_t r = 0; r < bsz; ++r) {
      const double* d = delta.data.data() + r * n_out;
      const double* xr = in.data.data() + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        double g = 0.0;
        const double* wi = w + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) g += wi[o] * d[o];
        if (l == layers - 1 && lambda != 0.0) g += feature_grad.at(r, i);
        prev.at(r, i) = xr[i] > 0.0 ? g : 0.0;
      }
    }
    delta = std::move(prev);
  }
  return out;
}

}  // namespace corrupt_bench
