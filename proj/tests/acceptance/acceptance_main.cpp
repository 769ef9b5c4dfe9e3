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

// Acceptance suite: one PASS/FAIL line per criterion, at the stated
// tolerances and runtime budgets. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "corrupt_bench/corruptions.hpp"
#include "corrupt_bench/evaluation.hpp"
#include "corrupt_bench/experiment.hpp"
#include "corrupt_bench/feature_metrics.hpp"
#include "corrupt_bench/mlp.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/report.hpp"
#include "corrupt_bench/synthetic.hpp"
#include "corrupt_bench/trainer.hpp"
#include "oracles.hpp"

namespace cb = corrupt_bench;
namespace ct = corrupt_bench::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0: no runtime bound
  std::function<Verdict()> body;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

cb::Permutation random_perm(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::shuffle(m.begin(), m.end(), gen);
  return cb::Permutation(std::move(m));
}

/// Random square side s and a divisor p of s.
std::pair<std::size_t, std::size_t> random_side_and_patch(std::mt19937_64& gen) {
  static const std::size_t sides[] = {4, 6, 8, 12, 16, 24, 32};
  const std::size_t s = sides[gen() % std::size(sides)];
  std::vector<std::size_t> divisors;
  for (std::size_t p = 1; p <= s; ++p) {
    if (s % p == 0) divisors.push_back(p);
  }
  return {s, divisors[gen() % divisors.size()]};
}

cb::ImageShape random_square_shape(std::mt19937_64& gen, std::size_t s) {
  return cb::ImageShape{s, s, (gen() % 2) ? 3u : 1u};
}

// ---------------------------------------------------------------------------
// 1. Corruption identities

Verdict corruption_identities() {
  Verdict v;
  std::mt19937_64 gen(1001);
  for (int i = 0; i < 1000; ++i) {
    const auto [s, p] = random_side_and_patch(gen);
    (void)p;
    const cb::ImageTensor img = ct::random_image(gen, random_square_shape(gen, s));
    const std::uint64_t seed = gen();
    if (!(cb::gamma_distort(img, 1.0) == img)) v.fail("gamma=1 changed an image");
    if (!(cb::global_shuffle(img, s, cb::make_patch_permutation(s, s, seed, cb::ShuffleScope::kGlobal)) == img)) {
      v.fail("global shuffle p=s changed an image");
    }
    if (!(cb::local_shuffle(img, 1, cb::make_patch_permutation(s, 1, seed, cb::ShuffleScope::kLocal)) == img)) {
      v.fail("local shuffle p=1 changed an image");
    }
    const auto [s2, p2] = std::pair{s, random_side_and_patch(gen).second};
    const std::size_t q = s % p2 == 0 ? p2 : 1;
    if (!(cb::global_shuffle(img, q, cb::Permutation::identity((s2 / q) * (s2 / q))) == img) ||
        !(cb::local_shuffle(img, q, cb::Permutation::identity(q * q)) == img)) {
      v.fail("identity permutation changed an image");
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto [s, p] = random_side_and_patch(gen);
    const std::uint64_t seed = gen();
    const cb::ImageTensor img = ct::random_image(gen, random_square_shape(gen, s));
    const cb::Permutation g = cb::make_patch_permutation(s, p, seed, cb::ShuffleScope::kGlobal);
    const cb::Permutation l = cb::make_patch_permutation(s, p, seed, cb::ShuffleScope::kLocal);
    if (!(cb::global_shuffle(cb::global_shuffle(img, p, g), p, g.inverse()) == img)) {
      v.fail("global shuffle inverse failed at s=" + std::to_string(s) + " p=" + std::to_string(p));
    }
    if (!(cb::local_shuffle(cb::local_shuffle(img, p, l), p, l.inverse()) == img)) {
      v.fail("local shuffle inverse failed at s=" + std::to_string(s) + " p=" + std::to_string(p));
    }
  }
  if (v.pass) v.detail = "1000 images x 4 identities, 1000 (s,p,seed) inverse round trips, all bitwise";
  return v;
}

// ---------------------------------------------------------------------------
// 2. Histogram conservation

Verdict histogram_conservation() {
  Verdict v;
  std::mt19937_64 gen(1002);
  for (int i = 0; i < 500; ++i) {
    const auto [s, p] = random_side_and_patch(gen);
    const cb::ImageTensor img = ct::random_image(gen, random_square_shape(gen, s));
    const auto before = ct::channel_histograms(img);
    const cb::ImageTensor g = cb::global_shuffle(img, p, random_perm(gen, (s / p) * (s / p)));
    const cb::ImageTensor l = cb::local_shuffle(img, p, random_perm(gen, p * p));
    if (ct::channel_histograms(g) != before) v.fail("global shuffle changed a histogram");
    if (ct::channel_histograms(l) != before) v.fail("local shuffle changed a histogram");
  }
  if (v.pass) v.detail = "500 random cases, per-channel 256-bin histograms identical";
  return v;
}

// ---------------------------------------------------------------------------
// 3. Gamma oracle

Verdict gamma_oracle() {
  Verdict v;
  std::size_t checked = 0;
  for (double g : {0.2, 0.5, 1.0, 2.5, 5.0}) {
    const auto table = cb::make_gamma_table(g);
    for (int x = 0; x < 256; ++x, ++checked) {
      const int want = ct::gamma_reference(x, g);
      if (table[x] != want) {
        v.fail("gamma " + fmt("%g", g) + " x=" + std::to_string(x) + ": got " + std::to_string(table[x]) +
               ", oracle " + std::to_string(want));
      }
    }
  }
  if (v.pass) v.detail = std::to_string(checked) + " table entries equal the 256-bit MPFR reference";
  return v;
}

// ---------------------------------------------------------------------------
// 4. KNN oracle equivalence

Verdict knn_oracle() {
  Verdict v;
  std::mt19937_64 gen(1004);
  std::uniform_int_distribution<std::size_t> n_dist(50, 500), d_dist(1, 64), c_dist(2, 10), m_dist(1, 100);
  std::size_t predictions = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = n_dist(gen), d = d_dist(gen), c = c_dist(gen), m = m_dist(gen);
    const cb::EmbeddingSet train = ct::random_embeddings(gen, n, d, c);
    const cb::EmbeddingSet query = ct::random_embeddings(gen, m, d, c);
    for (std::size_t k : {1u, 5u, 50u}) {
      const auto fast = cb::knn_predict(train, query, cb::KnnConfig{k, 0.07}).predictions;
      if (fast != ct::brute_force_knn(train, query, k, 0.07)) {
        v.fail("instance " + std::to_string(i) + " k=" + std::to_string(k) + " differs from brute force");
      }
      predictions += fast.size();
    }
  }
  if (v.pass) v.detail = "200 instances x K in {1,5,50}: " + std::to_string(predictions) + " predictions identical";
  return v;
}

// ---------------------------------------------------------------------------
// 5. Metric oracles

cb::DenseFeatures dense(std::size_t rows, std::size_t dim, std::vector<double> data, std::vector<std::uint32_t> labels) {
  cb::DenseFeatures f;
  f.rows = rows;
  f.dim = dim;
  f.data = std::move(data);
  f.labels = std::move(labels);
  return f;
}

Verdict metric_oracles() {
  Verdict v;
  std::mt19937_64 gen(1005);
  double worst_u = 0.0, worst_d = 0.0, worst_tv = 0.0;
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 20 + gen() % 180, d = 2 + gen() % 30, c = 2 + gen() % 4;
    const cb::DenseFeatures f = cb::DenseFeatures::from(ct::random_embeddings(gen, n, d, c)).normalized();
    worst_u = std::max(worst_u, std::fabs(cb::uniformity(f, std::nullopt, cb::UniformitySampling::exact()).value -
                                          ct::naive_uniformity(f)));
    for (std::uint32_t a = 0; a < c; ++a) {
      const std::size_t members = std::count(f.labels.begin(), f.labels.end(), a);
      if (members >= 2) {
        worst_u = std::max(worst_u, std::fabs(cb::uniformity(f, a, cb::UniformitySampling::exact()).value -
                                              ct::naive_uniformity(f, static_cast<int>(a))));
      }
      for (std::uint32_t b = 0; b < c; ++b) {
        const std::size_t other = std::count(f.labels.begin(), f.labels.end(), b);
        if (members == 0 || other == 0 || (a == b && members < 2)) continue;
        worst_d = std::max(worst_d, std::fabs(cb::feature_distance(f, a, b) - ct::naive_feature_distance(f, a, b)));
      }
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> acc(2 + gen() % 20, std::vector<double>(c));
    for (auto& row : acc) for (auto& x : row) x = u(gen);
    cb::CheckpointSeries series;
    series.num_classes = c;
    series.per_class = acc;
    const auto tv = cb::semantic_fluctuation(series);
    const auto oracle = ct::naive_fluctuation(acc);
    for (std::size_t k = 0; k < c; ++k) worst_tv = std::max(worst_tv, std::fabs(tv.per_class[k] - oracle[k]));
  }
  if (worst_u > 1e-9) v.fail("uniformity deviates from the oracle by " + fmt("%.3g", worst_u));
  if (worst_d > 1e-9) v.fail("feature distance deviates from the oracle by " + fmt("%.3g", worst_d));
  if (worst_tv > 1e-12) v.fail("fluctuation deviates from the oracle by " + fmt("%.3g", worst_tv));
  const auto exact = cb::UniformitySampling::exact();
  if (cb::uniformity(dense(4, 3, {0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0}, {0, 0, 0, 0}), std::nullopt, exact).value != 0.0) {
    v.fail("U of identical features is not exactly 0");
  }
  if (cb::uniformity(dense(2, 2, {1, 0, -1, 0}, {0, 0}), std::nullopt, exact).value != 8.0) {
    v.fail("U of an antipodal pair is not exactly 8");
  }
  if (cb::feature_distance(dense(2, 2, {0, 1, 0, -1}, {0, 1}), 0, 1) != 4.0) {
    v.fail("d of antipodal singletons is not exactly 4");
  }
  if (v.pass) {
    v.detail = "max |err| U " + fmt("%.2g", worst_u) + ", d " + fmt("%.2g", worst_d) + ", TV " + fmt("%.2g", worst_tv) +
               "; anchors U=0, U=8, d=4 exact";
  }
  return v;
}

// ---------------------------------------------------------------------------
// 6. Gradient check

Verdict gradient_check() {
  Verdict v;
  std::mt19937_64 gen(1006);
  double worst = 0.0;
  std::size_t params = 0, redraws = 0;
  for (double lambda : {-0.01, 0.0, 0.01}) {
    int models = 0;
    while (models < 20) {
      const std::size_t d_in = 4 + gen() % 5, h = 3 + gen() % 5, feat = 2 + gen() % 4, classes = 2 + gen() % 3;
      const std::size_t batch = 4 + gen() % 8;
      cb::MlpModel m = cb::MlpModel::random({d_in, h, feat, classes}, gen());
      std::normal_distribution<double> nd(0.0, 0.1);
      for (std::size_t l = 0; l < m.num_layers(); ++l) {
        for (std::size_t o = 0; o < m.layer_sizes()[l + 1]; ++o) m.bias(l, o) = nd(gen);
      }
      cb::Matrix x(batch, d_in);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& val : x.data) val = u(gen);
      // A pre-activation within the step of a ReLU kink makes the central
      // difference straddle the kink; such draws are discarded and redrawn.
      if (ct::min_hidden_margin(m, x) < 1e-3) {
        ++redraws;
        continue;
      }
      std::vector<std::uint32_t> labels(batch);
      for (auto& l : labels) l = static_cast<std::uint32_t>(gen() % classes);
      const auto check = ct::finite_difference_check(m, x, labels, lambda, 1e-4, 1e-6);
      worst = std::max(worst, check.max_rel_error);
      if (check.max_rel_error >= 1e-4) {
        v.fail("lambda " + fmt("%+.2f", lambda) + " model " + std::to_string(models) + " param " +
               std::to_string(check.worst_index) + " relative error " + fmt("%.3g", check.max_rel_error));
      }
      params += m.params().size();
      ++models;
    }
  }
  v.notes.push_back("kink redraws: " + std::to_string(redraws));
  if (v.pass) {
    v.detail = "60 models (20 per lambda), " + std::to_string(params) + " gradients, max relative error " +
               fmt("%.2g", worst);
  }
  return v;
}

// ---------------------------------------------------------------------------
// 7. Uniformity regularization, sign-level

constexpr std::uint64_t kSeeds[] = {1, 2, 3};

cb::TrainConfig regularizer_config(double lambda, std::uint64_t seed) {
  cb::TrainConfig tc;
  tc.lambda = lambda;
  tc.epochs = 50;
  tc.batch_size = 64;
  tc.learning_rate = 0.05;
  tc.hidden = {128};
  tc.feature_dim = 64;
  tc.seed = seed;
  tc.checkpoint_every = tc.epochs;
  return tc;
}

Verdict regularizer_signs() {
  Verdict v;
  const cb::SyntheticSplits data = cb::make_synthetic(cb::SyntheticSpec{});
  std::vector<cb::CorruptionSpec> grid(3);
  grid[0].kind = cb::CorruptionKind::kGamma;
  grid[0].gamma = 5.0;
  grid[1].kind = cb::CorruptionKind::kLocalShuffle;
  grid[1].patch = 4;
  grid[1].seed = 11;
  grid[2].kind = cb::CorruptionKind::kGlobalShuffle;
  grid[2].patch = 4;
  grid[2].seed = 12;
  std::vector<cb::SyntheticSplits> corrupted;
  for (const auto& c : grid) corrupted.push_back({cb::apply_corruption(data.train, c), cb::apply_corruption(data.test, c)});

  const double lambdas[] = {0.01, 0.0, -0.01};
  int uniform_ordered = 0;
  std::vector<int> wins(grid.size(), 0);
  int mean_wins = 0;
  for (std::uint64_t seed : kSeeds) {
    double u[3];
    std::vector<std::vector<double>> acc(3, std::vector<double>(grid.size()));
    for (int li = 0; li < 3; ++li) {
      const cb::TrainConfig tc = regularizer_config(lambdas[li], seed);
      const cb::MlpModel init = cb::make_probe_model(tc, data.train.shape(), data.train.num_classes());
      const cb::TrainResult r = cb::train_probe(init, data.train, tc, data.test);
      u[li] = cb::uniformity(cb::probe_features(r.model, data.test)).value;
      for (std::size_t c = 0; c < grid.size(); ++c) {
        acc[li][c] = cb::knn_predict(cb::probe_features(r.model, corrupted[c].train),
                                     cb::probe_features(r.model, corrupted[c].test), cb::KnnConfig{})
                         .accuracy.top1;
      }
    }
    const bool ordered = u[0] > u[1] && u[1] > u[2];
    uniform_ordered += ordered ? 1 : 0;
    std::string line = "seed " + std::to_string(seed) + ": U " + fmt("%.3f", u[0]) + " / " + fmt("%.3f", u[1]) +
                       " / " + fmt("%.3f", u[2]) + (ordered ? " ordered" : " NOT ordered") + "; KNN +/- ";
    double mean_plus = 0.0, mean_minus = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      wins[c] += acc[0][c] > acc[2][c] ? 1 : 0;
      mean_plus += acc[0][c] / 3.0;
      mean_minus += acc[2][c] / 3.0;
      line += grid[c].display_label() + " " + fmt("%.3f", acc[0][c]) + "/" + fmt("%.3f", acc[2][c]) + " ";
    }
    mean_wins += mean_plus > mean_minus ? 1 : 0;
    line += "mean " + fmt("%.4f", mean_plus) + "/" + fmt("%.4f", mean_minus);
    v.notes.push_back(line);
  }
  if (uniform_ordered != 3) v.fail("uniformity ordered in only " + std::to_string(uniform_ordered) + "/3 seeds");
  std::string tally;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    tally += (c ? ", " : "") + grid[c].display_label() + " " + std::to_string(wins[c]) + "/3";
    if (wins[c] < 2) {
      v.fail("corrupted KNN favours lambda=+0.01 in " + std::to_string(wins[c]) + "/3 seeds for " +
             grid[c].display_label());
    }
  }
  v.notes.push_back("lambda=+0.01 wins per corruption: " + tally + "; on the corruption mean: " +
                    std::to_string(mean_wins) + "/3");
  if (v.pass) v.detail = "U ordered 3/3; +0.01 beats -0.01 on " + tally;
  return v;
}

// ---------------------------------------------------------------------------
// 8. Delta self-consistency

/// Recomputes every Δ of a report from its own accuracy fields.
double worst_delta_error(const cb::MetricsReport& report) {
  double a0 = -1.0;
  for (const auto& row : report.rows) {
    if (row.label == "Orig") a0 = row.accuracy;
  }
  if (a0 <= 0.0) return INFINITY;
  double worst = 0.0;
  for (const auto& row : report.rows) {
    worst = std::max(worst, std::fabs((a0 - row.accuracy) / a0 - row.delta));
    if (row.accuracy_original_test.has_value() != row.delta_original_test.has_value()) return INFINITY;
    if (row.delta_original_test) {
      worst = std::max(worst, std::fabs((a0 - *row.accuracy_original_test) / a0 - *row.delta_original_test));
    }
  }
  return worst;
}

std::vector<cb::MetricsReport> g_reports;  // every report produced by the suite

const char* kSmallDownstream =
    "mode = downstream\nseed = 8\nevaluation = knn(k=20)\nmetrics = on\n"
    "data = synthetic(classes=4, train=400, test=200, size=16)\n"
    "probe = mlp(hidden=64, features=32, epochs=10, batch=32, lr=0.05)\n"
    "corruption = gamma(gamma=5)\ncorruption = gamma(gamma=0.2)\n"
    "corruption = global_shuffle(p=4)\ncorruption = local_shuffle(p=4)\n"
    "corruption = longtail(max=100, min=5)\ncorruption = uniform_subsample(per_class=20)\n";

const char* kSmallPretrain =
    "mode = pretrain\nseed = 9\nevaluation = knn(k=20)\nmetrics = on\n"
    "data = synthetic(classes=4, train=400, test=200, size=16)\n"
    "probe = mlp(hidden=64, features=32, epochs=10, batch=32, lr=0.05, checkpoint_every=2)\n"
    "corruption = global_shuffle(p=4)\ncorruption = gamma(gamma=5)\n"
    "augment = random_crop(padding=2)\naugment = hflip(prob=0.5)\norder = both\n";

Verdict delta_consistency() {
  Verdict v;
  cb::MetricsReport cell;
  cell.rows.push_back(cb::ReportRow{"Orig", "", 0.8953, cb::robustness_delta(0.8953, 0.8953), {}, {}, {}, {}, {}});
  cell.rows.push_back(cb::ReportRow{"Sup", "", 0.8736, cb::robustness_delta(0.8953, 0.8736), {}, {}, {}, {}, {}});
  const std::string csv = cb::report_to_csv(cell);
  if (csv.find("\nSup,,0.8736,2.4\n") == std::string::npos) v.fail("(89.53, 87.36) did not render as 2.4: " + csv);
  g_reports.push_back(cell);

  g_reports.push_back(cb::run_experiment(cb::parse_experiment_config(kSmallDownstream)));
  double worst = 0.0;
  std::size_t rows = 0;
  for (const auto& rep : g_reports) {
    // Audit the emitted form, not the in-memory one.
    const cb::MetricsReport parsed = cb::report_from_json(cb::report_to_json(rep));
    worst = std::max(worst, worst_delta_error(parsed));
    rows += parsed.rows.size();
  }
  if (!(worst <= 1e-9)) v.fail("a report delta deviates from its accuracies by " + fmt("%.3g", worst));
  if (v.pass) {
    v.detail = std::to_string(g_reports.size()) + " reports, " + std::to_string(rows) +
               " rows recomputed (max |err| " + fmt("%.2g", worst) + "); 0.8953 -> 0.8736 renders \"2.4\"";
  }
  return v;
}

// ---------------------------------------------------------------------------
// 9. Determinism

Verdict determinism() {
  Verdict v;
  const std::size_t saved = cb::thread_limit();
  std::size_t bytes = 0;
  for (const char* text : {kSmallDownstream, kSmallPretrain}) {
    const cb::ExperimentConfig cfg = cb::parse_experiment_config(text);
    std::string runs[3];
    const std::size_t threads[] = {1, 8, 8};
    for (int i = 0; i < 3; ++i) {
      cb::set_thread_limit(threads[i]);
      const cb::MetricsReport rep = cb::run_experiment(cfg);
      runs[i] = cb::report_to_json(rep);
      if (i == 0) g_reports.push_back(rep);
    }
    if (runs[0] != runs[1]) v.fail(std::string(cb::parse_experiment_config(text).mode == cb::ExperimentMode::kPretrain
                                                   ? "pretrain"
                                                   : "downstream") +
                                   " report differs between 1 and 8 threads");
    if (runs[1] != runs[2]) v.fail("report differs between two 8-thread runs");
    bytes += runs[0].size();
  }
  cb::set_thread_limit(saved);
  if (v.pass) v.detail = "downstream and pretrain reports byte-identical (" + std::to_string(bytes) + " bytes) under 1, 8, 8 threads";
  return v;
}

// ---------------------------------------------------------------------------
// 10. Corrupt/augment ordering

std::string ordering_config(std::uint64_t seed) {
  return "mode = pretrain\nseed = " + std::to_string(seed) +
         "\nevaluation = knn(k=50, tau=0.07)\n"
         "data = synthetic(classes=10, train=2000, test=1000, size=16)\n"
         "probe = mlp(hidden=128, features=64, epochs=50, batch=64, lr=0.05)\n"
         "corruption = global_shuffle(p=4)\n"
         "augment = random_crop(padding=2)\naugment = hflip(prob=0.5)\n"
         "order = both\n";
}

Verdict ordering_mechanism() {
  Verdict v;
  int wins = 0;
  for (std::uint64_t seed : kSeeds) {
    const cb::MetricsReport rep = cb::run_experiment(cb::parse_experiment_config(ordering_config(seed)));
    g_reports.push_back(rep);
    double corrupt_aug = NAN, aug_corrupt = NAN;
    for (const auto& row : rep.rows) {
      if (row.label != "G4x4") continue;
      if (row.variant == "corrupt_then_augment") corrupt_aug = row.delta;
      if (row.variant == "augment_then_corrupt") aug_corrupt = row.delta;
    }
    const bool win = aug_corrupt < corrupt_aug;
    wins += win ? 1 : 0;
    v.notes.push_back("seed " + std::to_string(seed) + ": delta corrupt->augment " + cb::format_delta_pct(corrupt_aug) +
                      "%, augment->corrupt " + cb::format_delta_pct(aug_corrupt) + "%" + (win ? "" : " (reversed)"));
  }
  if (wins < 2) v.fail("augment-then-corrupt has the smaller delta in only " + std::to_string(wins) + "/3 seeds");
  if (v.pass) v.detail = "augment-then-corrupt has the smaller G4x4 delta in " + std::to_string(wins) + "/3 seeds";
  return v;
}

}  // namespace

int main() {
  // The delta audit covers the reports produced by the determinism and
  // ordering checks, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "corruption identities", 10.0, corruption_identities},
      {2, "histogram conservation", 10.0, histogram_conservation},
      {3, "gamma oracle", 1.0, gamma_oracle},
      {4, "KNN oracle equivalence", 60.0, knn_oracle},
      {5, "metric oracles", 30.0, metric_oracles},
      {6, "gradient check", 60.0, gradient_check},
      {7, "uniformity regularizer signs", 600.0, regularizer_signs},
      {9, "determinism", 300.0, determinism},
      {10, "corrupt/augment ordering", 0.0, ordering_mechanism},
      {8, "delta self-consistency", 0.0, delta_consistency},
  };
  std::vector<std::string> lines(11);
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      v.fail("runtime " + fmt("%.1f", secs) + " s exceeds the " + fmt("%.0f", c.budget_s) + " s budget");
    }
    failures += v.pass ? 0 : 1;
    std::string line = std::string(v.pass ? "[PASS] " : "[FAIL] ") + std::to_string(c.id) + ": " + c.name + " - " +
                       v.detail + " (" + fmt("%.1f", secs) + " s" +
                       (c.budget_s > 0.0 ? ", budget " + fmt("%.0f", c.budget_s) + " s" : "") + ")";
    for (const auto& n : v.notes) line += "\n       " + n;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines[c.id] = line;
  }
  std::printf("\nsummary (criterion order):\n");
  for (int id = 1; id <= 10; ++id) std::printf("  %s\n", lines[id].substr(0, lines[id].find('\n')).c_str());
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
