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

#include "corrupt_bench/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

AccuracyResult compute_accuracy(std::span<const std::uint32_t> predicted,
                                std::span<const std::uint32_t> truth, std::size_t num_classes) {
  if (predicted.size() != truth.size()) {
    throw ParameterError("prediction and label counts differ");
  }
  AccuracyResult r;
  r.n_eval = truth.size();
  r.per_class.assign(num_classes, 0.0);
  r.per_class_count.assign(num_classes, 0);
  std::vector<std::size_t> correct(num_classes, 0);
  std::size_t total_correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes) throw ParameterError("label exceeds class count");
    ++r.per_class_count[truth[i]];
    if (predicted[i] == truth[i]) {
      ++correct[truth[i]];
      ++total_correct;
    }
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (r.per_class_count[c] > 0) {
      r.per_class[c] = static_cast<double>(correct[c]) / static_cast<double>(r.per_class_count[c]);
    }
  }
  r.top1 = r.n_eval == 0 ? 0.0
                         : static_cast<double>(total_correct) / static_cast<double>(r.n_eval);
  return r;
}

// ---------------------------------------------------------------------------

void KnnConfig::validate() const {
  if (k < 1) throw ParameterError("knn k must be >= 1");
  if (!(temperature > 0.0)) throw ParameterError("knn temperature must be > 0");
}

KnnResult knn_predict(const EmbeddingSet& train_in, const EmbeddingSet& query_in,
                      const KnnConfig& cfg) {
  cfg.validate();
  if (train_in.rows() == 0) throw ParameterError("knn train set is empty");
  if (train_in.dim() != query_in.dim()) {
    throw ParameterError("knn dimension mismatch: train " + std::to_string(train_in.dim()) +
                         " vs query " + std::to_string(query_in.dim()));
  }
  if (cfg.k > train_in.rows()) {
    throw ParameterError("knn k = " + std::to_string(cfg.k) + " exceeds train size " +
                         std::to_string(train_in.rows()));
  }
  const EmbeddingSet train = ensure_normalized(train_in);
  const EmbeddingSet query = ensure_normalized(query_in);
  const std::size_t n = train.rows();
  const std::size_t d = train.dim();
  const std::size_t classes = std::max(train.num_classes(), query.num_classes());
  const std::size_t k = cfg.k;

  const auto tf = train.features();
  std::vector<std::uint32_t> predictions(query.rows());

  parallel_for(query.rows(), [&](std::size_t q) {
    const auto qrow = query.row(q);
    std::vector<std::pair<double, std::size_t>> sims(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float* t = tf.data() + i * d;
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += static_cast<double>(qrow[j]) * t[j];
      sims[i] = {dot, i};
    }
    // Total order: higher similarity first, then lower train index.
    auto better = [](const std::pair<double, std::size_t>& a,
                     const std::pair<double, std::size_t>& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    };
    if (k < n) {
      std::nth_element(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k - 1), sims.end(),
                       better);
    }
    std::sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), better);

    std::vector<double> score(classes, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      score[train.label(sims[r].second)] += std::exp(sims[r].first / cfg.temperature);
    }
    std::uint32_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (score[c] > score[best]) best = static_cast<std::uint32_t>(c);
    }
    predictions[q] = best;
  });

  KnnResult result;
  result.accuracy = compute_accuracy(predictions, query.labels(), classes);
  result.predictions = std::move(predictions);
  return result;
}

// ---------------------------------------------------------------------------

void LinearProbeConfig::validate() const {
  if (epochs < 1) throw ConfigError("linear probe epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("linear probe batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("linear probe learning rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("linear probe weight decay must be >= 0");
}

namespace {

std::vector<double> to_double_rows(const EmbeddingSet& set, bool normalize) {
  const EmbeddingSet src = normalize ? ensure_normalized(set) : set;
  return std::vector<double>(src.features().begin(), src.features().end());
}

// Writes softmax probabilities of one row into `prob`; returns -log p[label].
double softmax_row(const LinearModel& m, const double* x, std::uint32_t label,
                   std::vector<double>& prob) {
  double peak = -INFINITY;
  for (std::size_t c = 0; c < m.num_classes; ++c) {
    double z = m.bias[c];
    const double* w = m.weights.data() + c * m.dim;
    for (std::size_t j = 0; j < m.dim; ++j) z += w[j] * x[j];
    prob[c] = z;
    peak = std::max(peak, z);
  }
  double total = 0.0;
  for (auto& p : prob) {
    p = std::exp(p - peak);
    total += p;
  }
  for (auto& p : prob) p /= total;
  return -std::log(std::max(prob[label], 1e-300));
}

double mean_loss(const LinearModel& m, const std::vector<double>& x,
                 const std::vector<std::uint32_t>& labels) {
  std::vector<double> prob(m.num_classes);
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += softmax_row(m, x.data() + i * m.dim, labels[i], prob);
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace

std::uint32_t LinearModel::predict(std::span<const float> features) const {
  std::uint32_t best = 0;
  double best_z = -INFINITY;
  for (std::size_t c = 0; c < num_classes; ++c) {
    double z = bias[c];
    const double* w = weights.data() + c * dim;
    for (std::size_t j = 0; j < dim; ++j) z += w[j] * features[j];
    if (z > best_z) {
      best_z = z;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

LinearModel train_linear_probe(const EmbeddingSet& train, const LinearProbeConfig& cfg) {
  cfg.validate();
  if (train.rows() == 0) throw ConfigError("linear probe train set is empty");
  const std::size_t classes = train.num_classes();
  if (classes < 2) throw ConfigError("linear probe needs at least 2 classes");

  LinearModel m;
  m.dim = train.dim();
  m.num_classes = classes;
  m.weights.assign(classes * m.dim, 0.0);
  m.bias.assign(classes, 0.0);
  m.normalize_inputs = cfg.normalize;

  const std::vector<double> x = to_double_rows(train, cfg.normalize);
  const std::vector<std::uint32_t>& y = train.labels();
  const std::size_t n = train.rows();
  m.initial_loss = mean_loss(m, x, y);

  std::vector<std::size_t> order(n);
  std::vector<double> prob(classes);
  std::vector<double> grad_w(classes * m.dim);
  std::vector<double> grad_b(classes);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t s = start; s < end; ++s) {
        const std::size_t i = order[s];
        const double* xi = x.data() + i * m.dim;
        epoch_total += softmax_row(m, xi, y[i], prob);
        for (std::size_t c = 0; c < classes; ++c) {
          const double g = prob[c] - (c == y[i] ? 1.0 : 0.0);
          grad_b[c] += g;
          double* gw = grad_w.data() + c * m.dim;
          for (std::size_t j = 0; j < m.dim; ++j) gw[j] += g * xi[j];
        }
      }
      for (std::size_t k = 0; k < grad_w.size(); ++k) {
        m.weights[k] -= cfg.learning_rate * (grad_w[k] * inv_b + cfg.weight_decay * m.weights[k]);
      }
      for (std::size_t c = 0; c < classes; ++c) m.bias[c] -= cfg.learning_rate * grad_b[c] * inv_b;
    }
    m.epoch_loss.push_back(epoch_total / static_cast<double>(n));
  }
  m.final_loss = mean_loss(m, x, y);
  m.loss_increased = m.final_loss > m.initial_loss;
  if (m.loss_increased) {
    std::fprintf(stderr, "warning: linear probe loss increased (%.6g -> %.6g)\n", m.initial_loss,
                 m.final_loss);
  }
  return m;
}

AccuracyResult evaluate_linear(const LinearModel& model, const EmbeddingSet& test,
                               std::vector<std::uint32_t>* predictions) {
  if (test.dim() != model.dim) {
    throw ParameterError("linear model dimension " + std::to_string(model.dim) +
                         " != test dimension " + std::to_string(test.dim()));
  }
  const EmbeddingSet src = model.normalize_inputs ? ensure_normalized(test) : test;
  std::vector<std::uint32_t> pred(src.rows());
  for (std::size_t i = 0; i < src.rows(); ++i) pred[i] = model.predict(src.row(i));
  const std::size_t classes = std::max(model.num_classes, src.num_classes());
  AccuracyResult r = compute_accuracy(pred, src.labels(), classes);
  if (predictions) *predictions = std::move(pred);
  return r;
}

// ---------------------------------------------------------------------------

double robustness_delta(double acc_original, double acc_corrupted) {
  if (!(acc_original > 0.0)) {
    throw UndefinedMetricError("robustness delta is undefined for original accuracy " +
                               std::to_string(acc_original));
  }
  return (acc_original - acc_corrupted) / acc_original;
}

std::string format_delta_pct(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", delta * 100.0);
  std::string out(buf);
  if (out == "-0.0") out = "0.0";
  return out;
}

}  // namespace corrupt_bench
