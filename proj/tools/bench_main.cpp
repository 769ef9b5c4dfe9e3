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

// bench: command-line front end of the corruption robustness engine.
//
//   bench run          --config <file> [--format json|csv] [--out <file>]
//   bench corrupt      --in <ds> --out <ds> --pipeline <cfg> --seed <u64> [--epoch <n>]
//   bench knn-eval     --train <emb> --test <emb> --k <n> [--tau <f>]
//   bench linear-eval  --train <emb> --test <emb> [--epochs <n> --lr <f> ...]
//   bench feat-metrics --emb <file> [--class <id>] [--pairs exact|auto|<m>]
//   bench train-probe  --data <ds> --eval <ds> --lambda <f> --epochs <n> --seed <u64> --out-dir <dir>
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// degeneracy.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrupt_bench/dataset_io.hpp"
#include "corrupt_bench/error.hpp"
#include "corrupt_bench/evaluation.hpp"
#include "corrupt_bench/experiment.hpp"
#include "corrupt_bench/feature_metrics.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/pipeline.hpp"
#include "corrupt_bench/report.hpp"
#include "corrupt_bench/trainer.hpp"
#include "json.hpp"

namespace cb = corrupt_bench;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

json accuracy_json(const cb::AccuracyResult& acc) {
  json j;
  j["top1"] = acc.top1;
  j["per_class"] = acc.per_class;
  j["per_class_count"] = acc.per_class_count;
  j["n_eval"] = acc.n_eval;
  return j;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = cb::read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

cb::UniformitySampling parse_pairs(const std::string& text, std::uint64_t seed) {
  if (text == "auto") return cb::UniformitySampling{cb::UniformitySampling::Mode::kAuto, 0, seed};
  if (text == "exact") return cb::UniformitySampling::exact();
  const std::uint64_t m = cb::parse_u64_value(text);
  if (m == 0) throw cb::ConfigError("--pairs must be exact, auto or a positive pair count");
  return cb::UniformitySampling::sampled(static_cast<std::size_t>(m), seed);
}

// The CLI --seed is authoritative for `corrupt`; a `seed =` line in the
// pipeline file is blanked so it cannot silently override it.
std::string strip_seed_lines(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    const bool is_seed = first != std::string::npos && line.compare(first, 4, "seed") == 0 &&
                         line.find('=', first) != std::string::npos &&
                         line.find_first_not_of(" \t", first + 4) == line.find('=', first);
    out += is_seed ? std::string() : line;
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string format = "json";
  std::string out;
};

int cmd_run(const RunArgs& a) {
  const cb::ExperimentConfig cfg = cb::load_experiment_config(a.config);
  const cb::MetricsReport report = cb::run_experiment(cfg);
  const cb::ReportFormat format = a.format == "csv" ? cb::ReportFormat::kCsv : cb::ReportFormat::kJson;
  if (!a.out.empty()) {
    cb::emit_report(report, format, a.out);
  } else {
    cb::validate_report(report);
    std::cout << (format == cb::ReportFormat::kCsv ? cb::report_to_csv(report) : cb::report_to_json(report));
  }
  return 0;
}

struct CorruptArgs {
  std::string in, out, pipeline;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
};

int cmd_corrupt(const CorruptArgs& a) {
  const cb::TransformPipeline pipe = cb::parse_pipeline(strip_seed_lines(read_text(a.pipeline)), a.seed);
  const cb::LabeledDataset ds = cb::load_dataset(a.in);
  const cb::LabeledDataset out = cb::apply_pipeline(ds, pipe, a.epoch);
  cb::save_dataset(out, a.out);
  json j;
  j["images"] = out.size();
  j["height"] = out.shape().height;
  j["width"] = out.shape().width;
  j["channels"] = out.shape().channels;
  j["num_classes"] = out.num_classes();
  j["label_histogram"] = out.label_histogram();
  j["pipeline"] = cb::format_pipeline(pipe);
  j["epoch"] = a.epoch;
  print_json(j);
  return 0;
}

struct KnnArgs {
  std::string train, test;
  std::size_t k = 50;
  double tau = 0.07;
};

int cmd_knn(const KnnArgs& a) {
  const cb::KnnConfig cfg{a.k, a.tau};
  const cb::KnnResult r = cb::knn_predict(cb::read_embeddings(a.train), cb::read_embeddings(a.test), cfg);
  json j = accuracy_json(r.accuracy);
  j["k"] = a.k;
  j["tau"] = a.tau;
  print_json(j);
  return 0;
}

struct LinearArgs {
  std::string train, test;
  cb::LinearProbeConfig cfg;
  bool raw = false;
};

int cmd_linear(LinearArgs a) {
  a.cfg.normalize = !a.raw;
  const cb::LinearModel model = cb::train_linear_probe(cb::read_embeddings(a.train), a.cfg);
  json j = accuracy_json(cb::evaluate_linear(model, cb::read_embeddings(a.test)));
  j["initial_loss"] = model.initial_loss;
  j["final_loss"] = model.final_loss;
  j["loss_increased"] = model.loss_increased;
  print_json(j);
  return 0;
}

struct MetricsArgs {
  std::string emb;
  std::optional<std::uint32_t> cls;
  std::string pairs = "auto";
  std::uint64_t seed = 0;
};

int cmd_metrics(const MetricsArgs& a) {
  const cb::EmbeddingSet set = cb::read_embeddings(a.emb);
  const cb::DenseFeatures unit = cb::DenseFeatures::from(set).normalized();
  const cb::UniformitySampling sampling = parse_pairs(a.pairs, a.seed);
  const std::size_t classes = set.num_classes();

  const cb::UniformityEstimate overall = cb::uniformity(unit, a.cls, sampling);
  json j;
  j["uniformity"] = overall.value;
  j["n_pairs"] = overall.n_pairs;
  j["exact"] = overall.exact;
  j["estimator"] = sampling.describe();
  if (a.cls) j["class"] = *a.cls;
  json per_class = json::array();
  const auto histogram = [&] {
    std::vector<std::size_t> h(classes, 0);
    for (auto l : set.labels()) ++h[l];
    return h;
  }();
  for (std::uint32_t c = 0; c < classes; ++c) {
    per_class.push_back(histogram[c] >= 2 ? json(cb::uniformity(unit, c, sampling).value) : json(nullptr));
  }
  j["per_class_uniformity"] = std::move(per_class);
  json matrix = json::array();
  for (const auto& row : cb::distance_matrix(unit, classes)) {
    json line = json::array();
    for (double v : row) line.push_back(nullable(v));
    matrix.push_back(std::move(line));
  }
  j["distance_matrix"] = std::move(matrix);
  print_json(j);
  return 0;
}

struct ProbeArgs {
  std::string data, eval, out_dir;
  cb::TrainConfig cfg;
  std::string hidden = "512";
};

int cmd_train_probe(ProbeArgs a) {
  a.cfg.hidden.clear();
  if (a.hidden != "none") {
    std::stringstream ss(a.hidden);
    std::string part;
    while (std::getline(ss, part, ':')) a.cfg.hidden.push_back(static_cast<std::size_t>(cb::parse_u64_value(part)));
  }
  a.cfg.validate();
  const cb::LabeledDataset train = cb::load_dataset(a.data);
  const cb::LabeledDataset eval = cb::load_dataset(a.eval);
  const std::size_t classes = std::max(train.num_classes(), eval.num_classes());
  const cb::MlpModel init = cb::make_probe_model(a.cfg, train.shape(), classes);
  const cb::TrainResult result = cb::train_probe(init, train, a.cfg, eval);

  const std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw cb::IoError("cannot create " + dir.string() + ": " + ec.message());
  json files = json::array();
  for (std::size_t t = 0; t < result.eval_features.size(); ++t) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_%04zu.emb", result.series.epochs[t]);
    cb::write_embeddings(result.eval_features[t], dir / name);
    files.push_back(name);
  }
  std::string csv = "epoch";
  for (std::size_t c = 0; c < result.series.num_classes; ++c) csv += ",class_" + std::to_string(c);
  csv += "\n";
  for (std::size_t t = 0; t < result.series.size(); ++t) {
    csv += std::to_string(result.series.epochs[t]);
    for (double v : result.series.per_class[t]) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.6f", v);
      csv += buf;
    }
    csv += "\n";
  }
  cb::write_file_bytes(dir / "checkpoints.csv",
                       std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));

  json j;
  j["checkpoints"] = std::move(files);
  j["series"] = "checkpoints.csv";
  j["epoch_loss"] = result.epoch_loss;
  if (!result.eval_features.empty()) {
    j["final_uniformity"] = cb::uniformity(result.eval_features.back()).value;
  }
  if (result.series.size() >= 2) j["fluctuation"] = cb::semantic_fluctuation(result.series).mean;
  print_json(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic data-corruption robustness benchmark"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "Worker thread cap (overrides CORRUPT_BENCH_THREADS)")
      ->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config and emit its report");
  run_cmd->add_option("--config", run.config, "Experiment config file")->required();
  run_cmd->add_option("--format", run.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--out", run.out, "Write the report here instead of stdout");

  CorruptArgs corrupt;
  auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply a transform pipeline to a dataset");
  corrupt_cmd->add_option("--in", corrupt.in, "Input dataset (CIFAR .bin or raw image dir)")->required();
  corrupt_cmd->add_option("--out", corrupt.out, "Output dataset (.bin or directory)")->required();
  corrupt_cmd->add_option("--pipeline", corrupt.pipeline, "Pipeline config file")->required();
  corrupt_cmd->add_option("--seed", corrupt.seed, "Pipeline seed")->required();
  corrupt_cmd->add_option("--epoch", corrupt.epoch, "Epoch index for augmentation randomness");

  KnnArgs knn;
  auto* knn_cmd = app.add_subcommand("knn-eval", "Weighted KNN accuracy of EMB1 embeddings");
  knn_cmd->add_option("--train", knn.train, "Bank embeddings")->required();
  knn_cmd->add_option("--test", knn.test, "Query embeddings")->required();
  knn_cmd->add_option("--k", knn.k, "Neighbour count")->required();
  knn_cmd->add_option("--tau", knn.tau, "Similarity temperature");

  LinearArgs linear;
  auto* linear_cmd = app.add_subcommand("linear-eval", "Linear probe accuracy of EMB1 embeddings");
  linear_cmd->add_option("--train", linear.train, "Training embeddings")->required();
  linear_cmd->add_option("--test", linear.test, "Test embeddings")->required();
  linear_cmd->add_option("--epochs", linear.cfg.epochs, "SGD epochs");
  linear_cmd->add_option("--lr", linear.cfg.learning_rate, "Learning rate");
  linear_cmd->add_option("--batch", linear.cfg.batch_size, "Minibatch size");
  linear_cmd->add_option("--weight-decay", linear.cfg.weight_decay, "L2 weight decay");
  linear_cmd->add_option("--seed", linear.cfg.seed, "Shuffle seed");
  linear_cmd->add_flag("--no-normalize", linear.raw, "Use features without l2 normalization");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("feat-metrics", "Uniformity and class distances of embeddings");
  metrics_cmd->add_option("--emb", metrics.emb, "EMB1 embeddings")->required();
  metrics_cmd->add_option("--class", metrics.cls, "Restrict the headline uniformity to one class");
  metrics_cmd->add_option("--pairs", metrics.pairs, "exact, auto, or a sampled pair count");
  metrics_cmd->add_option("--seed", metrics.seed, "Pair sampling seed");

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("train-probe", "Train the MLP probe and write checkpoint embeddings");
  probe_cmd->add_option("--data", probe.data, "Training dataset")->required();
  probe_cmd->add_option("--eval", probe.eval, "Evaluation dataset")->required();
  probe_cmd->add_option("--lambda", probe.cfg.lambda, "Uniformity coefficient (+ promotes)")->required();
  probe_cmd->add_option("--epochs", probe.cfg.epochs, "Training epochs")->required();
  probe_cmd->add_option("--seed", probe.cfg.seed, "Initialization and shuffle seed")->required();
  probe_cmd->add_option("--out-dir", probe.out_dir, "Output directory")->required();
  probe_cmd->add_option("--hidden", probe.hidden, "Hidden widths before the feature layer, e.g. 512 or 256:128");
  probe_cmd->add_option("--features", probe.cfg.feature_dim, "Feature layer width");
  probe_cmd->add_option("--batch", probe.cfg.batch_size, "Minibatch size");
  probe_cmd->add_option("--lr", probe.cfg.learning_rate, "Learning rate");
  probe_cmd->add_option("--checkpoint-every", probe.cfg.checkpoint_every, "Epochs between checkpoints");
  probe_cmd->add_option("--k", probe.cfg.knn.k, "KNN neighbours for per-class checkpoint accuracy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (threads) cb::set_thread_limit(*threads);
    if (*run_cmd) return cmd_run(run);
    if (*corrupt_cmd) return cmd_corrupt(corrupt);
    if (*knn_cmd) return cmd_knn(knn);
    if (*linear_cmd) return cmd_linear(linear);
    if (*metrics_cmd) return cmd_metrics(metrics);
    if (*probe_cmd) return cmd_train_probe(probe);
  } catch (const cb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
