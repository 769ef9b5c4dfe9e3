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

#include "corrupt_bench/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "corrupt_bench/error.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("training epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (lambda != 0.0 && batch_size < 2) {
    throw ConfigError("uniformity regularization needs batch_size >= 2");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  for (auto h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
  knn.validate();
}

std::vector<std::size_t> TrainConfig::layer_sizes(std::size_t input_dim,
                                                  std::size_t num_classes) const {
  std::vector<std::size_t> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(feature_dim);
  sizes.push_back(num_classes);
  return sizes;
}

Matrix images_to_matrix(const LabeledDataset& ds) {
  const std::size_t width = ds.shape().size();
  Matrix m(ds.size(), width);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto px = ds.image(i).data();
    double* row = m.data.data() + i * width;
    for (std::size_t k = 0; k < width; ++k) row[k] = px[k] / 255.0;
  }
  return m;
}

EmbeddingSet embed(const MlpModel& model, const LabeledDataset& ds) {
  const ForwardResult f = forward(model, images_to_matrix(ds));
  std::vector<float> feats(f.features.data.size());
  std::transform(f.features.data.begin(), f.features.data.end(), feats.begin(),
                 [](double v) { return static_cast<float>(v); });
  return EmbeddingSet(ds.size(), f.features.cols, std::move(feats), ds.labels(), false);
}

MlpModel make_probe_model(const TrainConfig& cfg, const ImageShape& shape, std::size_t num_classes) {
  return MlpModel::random(cfg.layer_sizes(shape.size(), num_classes), derive_seed(cfg.seed, 0x696e6974ULL));
}

EmbeddingSet probe_features(const MlpModel& model, const LabeledDataset& ds) {
  EmbeddingSet raw = embed(model, ds);
  std::vector<float> f(raw.features().begin(), raw.features().end());
  const std::size_t d = raw.dim();
  bool repaired = false;
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    float* row = f.data() + i * d;
    if (std::all_of(row, row + d, [](float v) { return v == 0.0f; })) {
      row[0] = kDeadFeatureValue;
      repaired = true;
    }
  }
  if (!repaired) return raw;
  return EmbeddingSet(raw.rows(), d, std::move(f), raw.labels(), false);
}

namespace {

AccuracyResult checkpoint_accuracy(const EmbeddingSet& bank, const EmbeddingSet& query,
                                   const KnnConfig& knn) {
  KnnConfig cfg = knn;
  cfg.k = std::min(cfg.k, bank.rows());
  return knn_predict(bank, query, cfg).accuracy;
}

}  // namespace

TrainResult train_probe(const MlpModel& init, const LabeledDataset& train, const TrainConfig& cfg,
                        const LabeledDataset& eval, const TransformPipeline* augment,
                        const LabeledDataset* bank) {
  cfg.validate();
  if (train.empty()) throw ConfigError("training set is empty");
  if (train.shape().size() != init.input_dim()) {
    throw CompatibilityError("training images do not match the model input width");
  }
  if (bank && bank->shape().size() != init.input_dim()) {
    throw CompatibilityError("KNN bank images do not match the model input width");
  }
  if (!eval.empty() && eval.shape().size() != init.input_dim()) {
    throw CompatibilityError("eval images do not match the training image shape");
  }
  if (train.num_classes() > init.num_classes()) {
    throw CompatibilityError("dataset has more classes than the model outputs");
  }

  TrainResult result;
  result.model = init;
  result.series.num_classes = init.num_classes();

  const bool per_epoch = augment && !augment->empty();
  Matrix fixed_inputs;
  if (!per_epoch) fixed_inputs = images_to_matrix(train);
  const LabeledDataset& bank_set = bank ? *bank : train;

  std::vector<std::size_t> order;
  MlpModel& model = result.model;
  const std::size_t width = init.input_dim();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Matrix epoch_inputs;
    const Matrix* inputs = &fixed_inputs;
    LabeledDataset view;
    const LabeledDataset* source = &train;
    if (per_epoch) {
      view = apply_pipeline(train, *augment, epoch);
      if (view.empty() || view.shape().size() != width) {
        throw CompatibilityError("training pipeline output does not match the model input width");
      }
      epoch_inputs = images_to_matrix(view);
      inputs = &epoch_inputs;
      source = &view;
    }
    const std::size_t n = source->size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, 0x65706f63ULL, epoch));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start + 2 <= n || (start < n && n == 1); start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      if (end - start < 2 && n > 1) break;
      Matrix batch(end - start, width);
      std::vector<std::uint32_t> labels(end - start);
      for (std::size_t r = start; r < end; ++r) {
        const std::size_t i = order[r];
        std::copy_n(inputs->data.begin() + static_cast<std::ptrdiff_t>(i * width), width,
                    batch.data.begin() + static_cast<std::ptrdiff_t>((r - start) * width));
        labels[r - start] = source->label(i);
      }
      const LossResult lr = loss_and_grad(model, batch, labels, cfg.lambda);
      auto params = model.mutable_params();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * lr.grad[k];
      loss_total += lr.loss;
      ++batches;
    }
    result.epoch_loss.push_back(batches ? loss_total / static_cast<double>(batches) : 0.0);

    const bool checkpoint = (epoch + 1) % cfg.checkpoint_every == 0 || epoch + 1 == cfg.epochs;
    if (checkpoint && !eval.empty()) {
      EmbeddingSet eval_feats = probe_features(model, eval);
      const EmbeddingSet bank_feats = probe_features(model, bank_set);
      const AccuracyResult acc = checkpoint_accuracy(bank_feats, eval_feats, cfg.knn);
      std::vector<double> per_class = acc.per_class;
      per_class.resize(result.series.num_classes, 0.0);
      result.series.epochs.push_back(epoch + 1);
      result.series.per_class.push_back(std::move(per_class));
      result.eval_features.push_back(std::move(eval_feats));
    }
  }
  return result;
}

}  // namespace corrupt_bench
