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

#include "corrupt_bench/experiment.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "corrupt_bench/config_text.hpp"
#include "corrupt_bench/dataset_io.hpp"
#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {
namespace {

// Stream constants separating the seeds derived from the experiment seed.
constexpr std::uint64_t kCorruptionStream = 0x636f7272ULL;
constexpr std::uint64_t kAugmentStream = 0x61756720ULL;
constexpr std::uint64_t kPairsStream = 0x70616972ULL;

const char* mode_name(ExperimentMode m) {
  return m == ExperimentMode::kDownstream ? "downstream" : "pretrain";
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::vector<std::size_t> parse_widths(const std::string& text, std::size_t line) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "none") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t colon = std::min(text.find(':', start), text.size());
    const std::uint64_t v = parse_u64_value(std::string_view(text).substr(start, colon - start), line);
    if (v == 0) throw ConfigError(line_prefix(line) + "hidden widths must be positive");
    out.push_back(static_cast<std::size_t>(v));
    start = colon + 1;
  }
  return out;
}

std::string format_widths(const std::vector<std::size_t>& widths) {
  if (widths.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) out += ':';
    out += std::to_string(widths[i]);
  }
  return out;
}

void parse_data(const CallExpr& call, const std::filesystem::path& base, DataSource& data) {
  if (call.name == "synthetic") {
    call.require_known({"classes", "train", "test", "size", "channels", "blobs", "modes", "shift",
                        "noise", "brightness", "seed"});
    data.kind = DataSource::Kind::kSynthetic;
    SyntheticSpec& s = data.synthetic;
    s.num_classes = call.get_size("classes", s.num_classes);
    s.train_size = call.get_size("train", s.train_size);
    s.test_size = call.get_size("test", s.test_size);
    s.side = call.get_size("size", s.side);
    s.channels = call.get_size("channels", s.channels);
    s.blobs_per_class = call.get_size("blobs", s.blobs_per_class);
    s.modes_per_class = call.get_size("modes", s.modes_per_class);
    s.max_shift = call.get_size("shift", s.max_shift);
    s.noise = call.get_double("noise", s.noise);
    s.brightness_jitter = call.get_double("brightness", s.brightness_jitter);
    s.seed = call.get_u64("seed", s.seed);
  } else if (call.name == "files") {
    call.require_known({"train", "test"});
    if (!call.has("train") || !call.has("test")) {
      throw ConfigError(line_prefix(call.line) + "files(...) requires train= and test=");
    }
    data.kind = DataSource::Kind::kFiles;
    data.train = resolve(base, call.get_string("train", ""));
    data.test = resolve(base, call.get_string("test", ""));
  } else {
    throw ConfigError(line_prefix(call.line) + "unknown data source '" + call.name + "'");
  }
}

void parse_probe(const CallExpr& call, TrainConfig& probe) {
  if (call.name != "mlp") throw ConfigError(line_prefix(call.line) + "unknown probe '" + call.name + "'");
  call.require_known({"hidden", "features", "lambda", "epochs", "batch", "lr", "checkpoint_every", "seed"});
  if (call.has("hidden")) probe.hidden = parse_widths(*call.get("hidden"), call.line);
  probe.feature_dim = call.get_size("features", probe.feature_dim);
  probe.lambda = call.get_double("lambda", probe.lambda);
  probe.epochs = call.get_size("epochs", probe.epochs);
  probe.batch_size = call.get_size("batch", probe.batch_size);
  probe.learning_rate = call.get_double("lr", probe.learning_rate);
  probe.checkpoint_every = call.get_size("checkpoint_every", probe.checkpoint_every);
  probe.seed = call.get_u64("seed", probe.seed);
}

void parse_evaluation(const CallExpr& call, ExperimentConfig& cfg) {
  if (call.name == "knn") {
    call.require_known({"k", "tau"});
    cfg.evaluation = EvaluationKind::kKnn;
    cfg.knn.k = call.get_size("k", cfg.knn.k);
    cfg.knn.temperature = call.get_double("tau", cfg.knn.temperature);
  } else if (call.name == "linear") {
    call.require_known({"epochs", "lr", "batch", "weight_decay", "seed", "normalize"});
    cfg.evaluation = EvaluationKind::kLinear;
    cfg.linear.epochs = call.get_size("epochs", cfg.linear.epochs);
    cfg.linear.learning_rate = call.get_double("lr", cfg.linear.learning_rate);
    cfg.linear.batch_size = call.get_size("batch", cfg.linear.batch_size);
    cfg.linear.weight_decay = call.get_double("weight_decay", cfg.linear.weight_decay);
    cfg.linear.seed = call.get_u64("seed", cfg.linear.seed);
    cfg.linear.normalize = call.get_bool("normalize", cfg.linear.normalize);
  } else {
    throw ConfigError(line_prefix(call.line) + "unknown evaluation '" + call.name + "'");
  }
}

std::string format_evaluation(const ExperimentConfig& cfg) {
  if (cfg.evaluation == EvaluationKind::kKnn) {
    return format_call("knn", {{"k", std::to_string(cfg.knn.k)}, {"tau", format_number(cfg.knn.temperature)}});
  }
  const auto& l = cfg.linear;
  return format_call("linear", {{"epochs", std::to_string(l.epochs)},
                                {"lr", format_number(l.learning_rate)},
                                {"batch", std::to_string(l.batch_size)},
                                {"weight_decay", format_number(l.weight_decay)},
                                {"seed", std::to_string(l.seed)},
                                {"normalize", l.normalize ? "true" : "false"}});
}

std::string format_sampling(const UniformitySampling& s) {
  switch (s.mode) {
    case UniformitySampling::Mode::kAuto: return "auto";
    case UniformitySampling::Mode::kExact: return "exact";
    case UniformitySampling::Mode::kSampled: return std::to_string(s.pairs);
  }
  return "auto";
}

// Report label of one grid cell; pre-training grids with several orders
// qualify the label with the order so external embeddings stay addressable.
std::string cell_key(const ExperimentConfig& cfg, const CorruptionSpec& spec, PipelineMode order) {
  std::string key = spec.display_label();
  if (cfg.mode == ExperimentMode::kPretrain && cfg.orders.size() > 1) {
    key += "@";
    key += pipeline_mode_name(order);
  }
  return key;
}

bool uses_builtin_order(const ExperimentConfig& cfg) {
  return cfg.mode == ExperimentMode::kPretrain;
}

}  // namespace

void ExperimentConfig::validate() const {
  std::set<std::string> labels;
  for (const auto& c : corruptions) {
    const std::string label = c.display_label();
    if (label == kOriginalLabel) throw ConfigError("corruption label \"Orig\" is reserved");
    if (!labels.insert(label).second) throw ConfigError("duplicate corruption label \"" + label + "\"");
  }
  if (orders.empty()) throw ConfigError("order must name at least one pipeline order");
  for (auto o : orders) {
    if (o == PipelineMode::kCustom) throw ConfigError("order must be corrupt_then_augment, augment_then_corrupt or both");
  }
  if (evaluation == EvaluationKind::kKnn) {
    knn.validate();
  } else {
    linear.validate();
  }
  if (source == EmbeddingSource::kBuiltin) {
    probe.validate();
    if (data.kind == DataSource::Kind::kSynthetic) {
      const auto& s = data.synthetic;
      if (s.num_classes < 2) throw ConfigError("synthetic data needs at least 2 classes");
      if (s.train_size < s.num_classes || s.test_size < 1) throw ConfigError("synthetic splits are too small");
      if (s.side < 1 || s.modes_per_class < 1 || (s.channels != 1 && s.channels != 3)) {
        throw ConfigError("synthetic images need size >= 1 and 1 or 3 channels");
      }
    }
  }
  for (const auto& a : augmentations) a.validate();
  for (const auto& c : corruptions) {
    if (c.kind != CorruptionKind::kDatasetSubstitute || c.substitute) c.validate();
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << "mode = " << mode_name(mode) << "\n";
  out << "seed = " << seed << "\n";
  out << "evaluation = " << format_evaluation(*this) << "\n";
  out << "source = " << (source == EmbeddingSource::kBuiltin ? "builtin" : "external") << "\n";
  for (const auto& c : corruptions) out << "corruption = " << format_corruption(c) << "\n";
  if (source == EmbeddingSource::kExternal) {
    for (const auto& e : embeddings) {
      std::vector<std::pair<std::string, std::string>> args{{"train", e.train.string()}, {"test", e.test.string()}};
      if (!e.train_original.empty()) args.emplace_back("train_original", e.train_original.string());
      if (!e.test_original.empty()) args.emplace_back("test_original", e.test_original.string());
      out << "embeddings = " << format_call(e.label, args) << "\n";
    }
  } else {
    if (data.kind == DataSource::Kind::kSynthetic) {
      const auto& s = data.synthetic;
      out << "data = "
          << format_call("synthetic", {{"classes", std::to_string(s.num_classes)},
                                       {"train", std::to_string(s.train_size)},
                                       {"test", std::to_string(s.test_size)},
                                       {"size", std::to_string(s.side)},
                                       {"channels", std::to_string(s.channels)},
                                       {"blobs", std::to_string(s.blobs_per_class)},
                                       {"modes", std::to_string(s.modes_per_class)},
                                       {"shift", std::to_string(s.max_shift)},
                                       {"noise", format_number(s.noise)},
                                       {"brightness", format_number(s.brightness_jitter)},
                                       {"seed", std::to_string(s.seed)}})
          << "\n";
    } else {
      out << "data = " << format_call("files", {{"train", data.train.string()}, {"test", data.test.string()}})
          << "\n";
    }
    out << "probe = "
        << format_call("mlp", {{"hidden", format_widths(probe.hidden)},
                               {"features", std::to_string(probe.feature_dim)},
                               {"lambda", format_number(probe.lambda)},
                               {"epochs", std::to_string(probe.epochs)},
                               {"batch", std::to_string(probe.batch_size)},
                               {"lr", format_number(probe.learning_rate)},
                               {"checkpoint_every", std::to_string(probe.checkpoint_every)},
                               {"seed", std::to_string(probe.seed)}})
        << "\n";
    for (const auto& a : augmentations) out << "augment = " << format_augmentation(a) << "\n";
  }
  if (uses_builtin_order(*this)) {
    out << "order = ";
    for (std::size_t i = 0; i < orders.size(); ++i) out << (i ? "," : "") << pipeline_mode_name(orders[i]);
    out << "\n";
  }
  out << "metrics = " << (metrics ? "on" : "off") << "\n";
  if (metrics) out << "pairs = " << format_sampling(sampling) << " seed " << sampling.seed << "\n";
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto entries = parse_config_lines(text);
  ExperimentConfig cfg;
  bool linear_seed_given = false;
  bool probe_seed_given = false;

  // The seed drives defaults elsewhere, so read it first.
  for (const auto& e : entries) {
    if (e.key == "seed") cfg.seed = parse_u64_value(e.value, e.line);
  }
  std::set<std::string> singletons;
  std::vector<CallExpr> corruption_calls;
  for (const auto& e : entries) {
    const bool repeatable = e.key == "corruption" || e.key == "embeddings" || e.key == "augment";
    if (!repeatable && !singletons.insert(e.key).second) {
      throw ConfigError(line_prefix(e.line) + "duplicate key '" + e.key + "'");
    }
    if (e.key == "seed") continue;
    if (e.key == "mode") {
      if (e.value == "downstream") cfg.mode = ExperimentMode::kDownstream;
      else if (e.value == "pretrain") cfg.mode = ExperimentMode::kPretrain;
      else throw ConfigError(line_prefix(e.line) + "mode must be downstream or pretrain");
    } else if (e.key == "evaluation") {
      const CallExpr call = parse_call(e.value, e.line);
      parse_evaluation(call, cfg);
      linear_seed_given = call.has("seed");
    } else if (e.key == "source") {
      if (e.value == "builtin") cfg.source = EmbeddingSource::kBuiltin;
      else if (e.value == "external") cfg.source = EmbeddingSource::kExternal;
      else throw ConfigError(line_prefix(e.line) + "source must be builtin or external");
    } else if (e.key == "corruption") {
      corruption_calls.push_back(parse_call(e.value, e.line));
    } else if (e.key == "embeddings") {
      const CallExpr call = parse_call(e.value, e.line);
      call.require_known({"train", "test", "train_original", "test_original"});
      if (!call.has("train") || !call.has("test")) {
        throw ConfigError(line_prefix(e.line) + "embeddings need train= and test=");
      }
      ExternalEmbedding emb;
      emb.label = call.name;
      emb.train = resolve(base_dir, call.get_string("train", ""));
      emb.test = resolve(base_dir, call.get_string("test", ""));
      emb.train_original = resolve(base_dir, call.get_string("train_original", ""));
      emb.test_original = resolve(base_dir, call.get_string("test_original", ""));
      for (const auto& other : cfg.embeddings) {
        if (other.label == emb.label) {
          throw ConfigError(line_prefix(e.line) + "duplicate embeddings for \"" + emb.label + "\"");
        }
      }
      cfg.embeddings.push_back(std::move(emb));
    } else if (e.key == "data") {
      parse_data(parse_call(e.value, e.line), base_dir, cfg.data);
    } else if (e.key == "probe") {
      const CallExpr call = parse_call(e.value, e.line);
      parse_probe(call, cfg.probe);
      probe_seed_given = call.has("seed");
    } else if (e.key == "augment") {
      cfg.augmentations.push_back(parse_augmentation(parse_call(e.value, e.line)));
    } else if (e.key == "order") {
      if (e.value == "both") {
        cfg.orders = {PipelineMode::kCorruptThenAugment, PipelineMode::kAugmentThenCorrupt};
      } else {
        const PipelineMode m = parse_pipeline_mode(e.value);
        if (m == PipelineMode::kCustom) {
          throw ConfigError(line_prefix(e.line) + "order must be corrupt_then_augment, augment_then_corrupt or both");
        }
        cfg.orders = {m};
      }
    } else if (e.key == "metrics") {
      cfg.metrics = e.value == "on" ? true : e.value == "off" ? false : parse_bool_value(e.value, e.line);
    } else if (e.key == "pairs") {
      if (e.value == "auto") {
        cfg.sampling.mode = UniformitySampling::Mode::kAuto;
      } else if (e.value == "exact") {
        cfg.sampling.mode = UniformitySampling::Mode::kExact;
      } else {
        cfg.sampling.mode = UniformitySampling::Mode::kSampled;
        cfg.sampling.pairs = static_cast<std::size_t>(parse_u64_value(e.value, e.line));
        if (cfg.sampling.pairs == 0) throw ConfigError(line_prefix(e.line) + "pairs must be >= 1");
      }
    } else {
      throw ConfigError(line_prefix(e.line) + "unknown key '" + e.key + "'");
    }
  }
  cfg.sampling.seed = derive_seed(cfg.seed, kPairsStream);
  if (!linear_seed_given) cfg.linear.seed = cfg.seed;
  if (!probe_seed_given) cfg.probe.seed = cfg.seed;
  cfg.probe.knn = cfg.knn;

  for (std::size_t i = 0; i < corruption_calls.size(); ++i) {
    CallExpr call = corruption_calls[i];
    if (!is_corruption_name(call.name)) {
      throw ConfigError(line_prefix(call.line) + "unknown corruption '" + call.name + "'");
    }
    for (auto& [k, v] : call.args) {
      if (call.name == "substitute" && k == "path") v = resolve(base_dir, v).string();
    }
    const bool load = cfg.source == EmbeddingSource::kBuiltin;
    try {
      cfg.corruptions.push_back(parse_corruption(call, derive_seed(cfg.seed, kCorruptionStream, i), load));
    } catch (const Error& err) {
      if (err.category() == ErrorCategory::kConfig) {
        throw ConfigError(line_prefix(call.line) + err.what());
      }
      throw;
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  return parse_experiment_config(text, path.parent_path());
}

std::vector<std::string> required_row_labels(const ExperimentConfig& cfg) {
  std::vector<std::string> labels{std::string(kOriginalLabel)};
  const std::vector<PipelineMode> single{PipelineMode::kCorruptThenAugment};
  const auto& orders = cfg.mode == ExperimentMode::kPretrain ? cfg.orders : single;
  for (const auto& c : cfg.corruptions) {
    for (auto o : orders) labels.push_back(cell_key(cfg, c, o));
  }
  return labels;
}

AccuracyResult evaluate_embeddings(const ExperimentConfig& cfg, const EmbeddingSet& bank,
                                   const EmbeddingSet& query) {
  if (cfg.evaluation == EvaluationKind::kKnn) return knn_predict(bank, query, cfg.knn).accuracy;
  const LinearModel model = train_linear_probe(bank, cfg.linear);
  return evaluate_linear(model, query);
}

SyntheticSplits load_experiment_data(const ExperimentConfig& cfg) {
  if (cfg.data.kind == DataSource::Kind::kSynthetic) return make_synthetic(cfg.data.synthetic);
  SyntheticSplits splits{load_dataset(cfg.data.train), load_dataset(cfg.data.test)};
  if (!(splits.train.shape() == splits.test.shape())) {
    throw CompatibilityError("train and test images have different shapes");
  }
  const std::size_t classes = std::max(splits.train.num_classes(), splits.test.num_classes());
  if (classes != splits.train.num_classes() || classes != splits.test.num_classes()) {
    splits.train = LabeledDataset(splits.train.images(), splits.train.labels(), classes);
    splits.test = LabeledDataset(splits.test.images(), splits.test.labels(), classes);
  }
  return splits;
}

namespace {

struct Cell {
  std::string label;
  std::string variant;
  const CorruptionSpec* spec = nullptr;  // nullptr for Orig
  PipelineMode order = PipelineMode::kCorruptThenAugment;
};

std::vector<Cell> make_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells{Cell{std::string(kOriginalLabel), "", nullptr, PipelineMode::kCorruptThenAugment}};
  const bool pretrain = cfg.mode == ExperimentMode::kPretrain;
  const std::vector<PipelineMode> single{PipelineMode::kCorruptThenAugment};
  for (const auto& c : cfg.corruptions) {
    for (auto o : pretrain ? cfg.orders : single) {
      cells.push_back(Cell{c.display_label(), pretrain ? pipeline_mode_name(o) : "", &c, o});
    }
  }
  return cells;
}

struct CellOutcome {
  double accuracy = 0.0;
  std::optional<double> accuracy_original_test;
  std::optional<double> uniformity;
  std::optional<double> fluctuation;
  std::optional<std::vector<std::vector<double>>> distances;
};

void add_metrics(const ExperimentConfig& cfg, const EmbeddingSet& query, std::size_t num_classes,
                 const CheckpointSeries* series, CellOutcome& out) {
  if (!cfg.metrics) return;
  const DenseFeatures unit = DenseFeatures::from(query).normalized();
  out.uniformity = uniformity(unit, std::nullopt, cfg.sampling).value;
  out.distances = distance_matrix(unit, num_classes);
  if (series && series->size() >= 2) out.fluctuation = semantic_fluctuation(*series).mean;
}

MetricsReport assemble(const ExperimentConfig& cfg, const std::vector<Cell>& cells,
                       const std::vector<CellOutcome>& outcomes) {
  MetricsReport report;
  const double a0 = outcomes.front().accuracy;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ReportRow row;
    row.label = cells[i].label;
    row.variant = cells[i].variant;
    row.accuracy = outcomes[i].accuracy;
    row.delta = robustness_delta(a0, row.accuracy);  // exactly 0 for Orig; throws if a0 = 0
    if (outcomes[i].accuracy_original_test) {
      row.accuracy_original_test = outcomes[i].accuracy_original_test;
      row.delta_original_test = robustness_delta(a0, *row.accuracy_original_test);
    }
    row.uniformity = outcomes[i].uniformity;
    row.fluctuation = outcomes[i].fluctuation;
    row.distances = outcomes[i].distances;
    report.rows.push_back(std::move(row));
  }
  report.metadata["config_hash"] = hex64(cfg.hash());
  report.metadata["mode"] = mode_name(cfg.mode);
  report.metadata["seed"] = std::to_string(cfg.seed);
  report.metadata["evaluation"] = format_evaluation(cfg);
  report.metadata["source"] = cfg.source == EmbeddingSource::kBuiltin ? "builtin" : "external";
  report.metadata["delta"] = "(acc_orig - acc) / acc_orig against the Orig row";
  if (cfg.metrics) {
    report.metadata["uniformity_estimator"] = cfg.sampling.describe();
    report.metadata["uniformity_features"] = "l2-normalized test-split features";
  }
  if (cfg.mode == ExperimentMode::kPretrain) {
    std::string orders;
    for (std::size_t i = 0; i < cfg.orders.size(); ++i) {
      orders += (i ? "," : "") + std::string(pipeline_mode_name(cfg.orders[i]));
    }
    report.metadata["orders"] = orders;
  }
  if (cfg.source == EmbeddingSource::kBuiltin) {
    report.metadata["probe_seed"] = std::to_string(cfg.probe.seed);
    report.metadata["knn_bank"] = "train split, same transform as the query split";
  }
  validate_report(report);
  return report;
}

// ---------------------------------------------------------------------------
// External embeddings

struct LoadedExternal {
  EmbeddingSet train, test;
  std::optional<EmbeddingSet> train_original, test_original;
};

std::vector<LoadedExternal> load_external(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
  std::vector<std::string> keys = required_row_labels(cfg);
  std::vector<const ExternalEmbedding*> entries;
  std::vector<std::string> missing;
  for (const auto& key : keys) {
    const ExternalEmbedding* found = nullptr;
    for (const auto& e : cfg.embeddings) {
      if (e.label == key) found = &e;
    }
    const auto exists = [](const std::filesystem::path& p) {
      std::error_code ec;
      return !p.empty() && std::filesystem::is_regular_file(p, ec);
    };
    if (!found || !exists(found->train) || !exists(found->test) ||
        (!found->train_original.empty() && !exists(found->train_original)) ||
        (!found->test_original.empty() && !exists(found->test_original))) {
      missing.push_back(key);
    }
    entries.push_back(found);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    throw IoError("missing embedding files for: " + list);
  }
  std::vector<LoadedExternal> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const ExternalEmbedding& e = *entries[i];
    LoadedExternal l{read_embeddings(e.train), read_embeddings(e.test), std::nullopt, std::nullopt};
    if (cfg.mode == ExperimentMode::kPretrain && i > 0 && !e.train_original.empty() &&
        !e.test_original.empty()) {
      l.train_original = read_embeddings(e.train_original);
      l.test_original = read_embeddings(e.test_original);
    }
    out.push_back(std::move(l));
  }
  return out;
}

MetricsReport run_external(const ExperimentConfig& cfg) {
  const std::vector<Cell> cells = make_cells(cfg);
  const std::vector<LoadedExternal> sets = load_external(cfg, cells);
  std::vector<CellOutcome> outcomes(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const LoadedExternal& l = sets[i];
    CellOutcome& out = outcomes[i];
    out.accuracy = evaluate_embeddings(cfg, l.train, l.test).top1;
    if (l.train_original) {
      out.accuracy_original_test = evaluate_embeddings(cfg, *l.train_original, *l.test_original).top1;
    }
    const std::size_t classes = std::max(l.train.num_classes(), l.test.num_classes());
    add_metrics(cfg, l.test, classes, nullptr, out);
  });
  return assemble(cfg, cells, outcomes);
}

// ---------------------------------------------------------------------------
// Builtin probe

struct CorruptedSplits {
  LabeledDataset train;
  LabeledDataset test;
};

// Image-level corruptions transform both splits with the same spec; dataset-
// level ones (subsampling, substitution) reshape the training split only.
CorruptedSplits corrupt_splits(const SyntheticSplits& clean, const CorruptionSpec& spec) {
  CorruptedSplits out{apply_corruption(clean.train, spec), clean.test};
  if (is_image_level(spec.kind)) out.test = apply_corruption(clean.test, spec);
  return out;
}

TrainConfig cell_train_config(const ExperimentConfig& cfg) {
  TrainConfig tc = cfg.probe;
  // Intermediate checkpoints only feed the fluctuation metric.
  if (!cfg.metrics) tc.checkpoint_every = tc.epochs;
  return tc;
}

struct BuiltinContext {
  SyntheticSplits clean;
  MlpModel init;
  TrainConfig train_cfg;
  std::uint64_t augment_seed = 0;
};

BuiltinContext make_context(const ExperimentConfig& cfg) {
  BuiltinContext ctx;
  ctx.clean = load_experiment_data(cfg);
  if (ctx.clean.train.empty() || ctx.clean.test.empty()) throw InsufficientDataError("empty train or test split");
  ctx.train_cfg = cell_train_config(cfg);
  ctx.init = make_probe_model(ctx.train_cfg, ctx.clean.train.shape(), ctx.clean.train.num_classes());
  ctx.augment_seed = derive_seed(cfg.seed, kAugmentStream);
  return ctx;
}

TrainResult train_clean(const ExperimentConfig& cfg, const BuiltinContext& ctx) {
  const TransformPipeline aug = TransformPipeline::ordered({}, cfg.augmentations, PipelineMode::kCustom,
                                                           ctx.augment_seed);
  return train_probe(ctx.init, ctx.clean.train, ctx.train_cfg, ctx.clean.test, aug.empty() ? nullptr : &aug);
}

CellOutcome evaluate_probe(const ExperimentConfig& cfg, const MlpModel& model, const LabeledDataset& bank,
                           const LabeledDataset& query, const CheckpointSeries* series) {
  CellOutcome out;
  const EmbeddingSet q = probe_features(model, query);
  out.accuracy = evaluate_embeddings(cfg, probe_features(model, bank), q).top1;
  add_metrics(cfg, q, model.num_classes(), series, out);
  return out;
}

}  // namespace

MetricsReport run_downstream_test(const ExperimentConfig& cfg) {
  if (cfg.mode != ExperimentMode::kDownstream) throw ConfigError("run_downstream_test needs mode = downstream");
  if (cfg.source == EmbeddingSource::kExternal) return run_external(cfg);

  const BuiltinContext ctx = make_context(cfg);
  const TrainResult trained = train_clean(cfg, ctx);
  const std::vector<Cell> cells = make_cells(cfg);
  std::vector<CellOutcome> outcomes(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    if (!cells[i].spec) {
      outcomes[i] = evaluate_probe(cfg, trained.model, ctx.clean.train, ctx.clean.test, &trained.series);
      return;
    }
    const CorruptedSplits data = corrupt_splits(ctx.clean, *cells[i].spec);
    outcomes[i] = evaluate_probe(cfg, trained.model, data.train, data.test, nullptr);
  });
  return assemble(cfg, cells, outcomes);
}

MetricsReport run_pretrain_test(const ExperimentConfig& cfg) {
  if (cfg.mode != ExperimentMode::kPretrain) throw ConfigError("run_pretrain_test needs mode = pretrain");
  if (cfg.source == EmbeddingSource::kExternal) return run_external(cfg);

  const BuiltinContext ctx = make_context(cfg);
  const std::vector<Cell> cells = make_cells(cfg);
  std::vector<CellOutcome> outcomes(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    if (!cells[i].spec) {
      const TrainResult trained = train_clean(cfg, ctx);
      outcomes[i] = evaluate_probe(cfg, trained.model, ctx.clean.train, ctx.clean.test, &trained.series);
      return;
    }
    const CorruptionSpec& spec = *cells[i].spec;
    const CorruptedSplits data = corrupt_splits(ctx.clean, spec);
    TrainResult trained;
    if (cfg.augmentations.empty()) {
      trained = train_probe(ctx.init, data.train, ctx.train_cfg, data.test);
    } else {
      const TransformPipeline pipe =
          TransformPipeline::ordered({spec}, cfg.augmentations, cells[i].order, ctx.augment_seed);
      trained = train_probe(ctx.init, ctx.clean.train, ctx.train_cfg, data.test, &pipe, &data.train);
    }
    CellOutcome out = evaluate_probe(cfg, trained.model, data.train, data.test, &trained.series);
    const EmbeddingSet clean_bank = probe_features(trained.model, ctx.clean.train);
    out.accuracy_original_test =
        evaluate_embeddings(cfg, clean_bank, probe_features(trained.model, ctx.clean.test)).top1;
    outcomes[i] = std::move(out);
  });
  return assemble(cfg, cells, outcomes);
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return cfg.mode == ExperimentMode::kDownstream ? run_downstream_test(cfg) : run_pretrain_test(cfg);
}

}  // namespace corrupt_bench
