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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "corrupt_bench/corruptions.hpp"
#include "corrupt_bench/error.hpp"
#include "oracles.hpp"

namespace cb = corrupt_bench;
using cb::testing::random_dataset;
using cb::testing::random_image;

namespace {

constexpr double kGammas[] = {0.2, 0.5, 1.0, 2.5, 5.0};

cb::Permutation random_permutation(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::shuffle(m.begin(), m.end(), gen);
  return cb::Permutation(std::move(m));
}

/// Direct reading of the definition: the patch at grid index i lands at grid
/// index perm[i].
cb::ImageTensor naive_global_shuffle(const cb::ImageTensor& img, std::size_t p, const cb::Permutation& perm) {
  cb::ImageTensor out(img.shape());
  const std::size_t g = img.width() / p;
  for (std::size_t i = 0; i < g * g; ++i) {
    const std::size_t dst = perm[i];
    for (std::size_t dy = 0; dy < p; ++dy) {
      for (std::size_t dx = 0; dx < p; ++dx) {
        for (std::size_t c = 0; c < img.channels(); ++c) {
          out.at((dst / g) * p + dy, (dst % g) * p + dx, c) = img.at((i / g) * p + dy, (i % g) * p + dx, c);
        }
      }
    }
  }
  return out;
}

/// Inside every patch, within-patch pixel j lands at within-patch index perm[j].
cb::ImageTensor naive_local_shuffle(const cb::ImageTensor& img, std::size_t p, const cb::Permutation& perm) {
  cb::ImageTensor out(img.shape());
  const std::size_t g = img.width() / p;
  for (std::size_t by = 0; by < g; ++by) {
    for (std::size_t bx = 0; bx < g; ++bx) {
      for (std::size_t j = 0; j < p * p; ++j) {
        const std::size_t dst = perm[j];
        for (std::size_t c = 0; c < img.channels(); ++c) {
          out.at(by * p + dst / p, bx * p + dst % p, c) = img.at(by * p + j / p, bx * p + j % p, c);
        }
      }
    }
  }
  return out;
}

/// Image whose first two channels hold the pixel coordinates, so that any
/// spatial rearrangement can be read back as a mapping.
cb::ImageTensor coordinate_image(std::size_t s) {
  cb::ImageTensor img(cb::ImageShape{s, s, 3});
  for (std::size_t y = 0; y < s; ++y) {
    for (std::size_t x = 0; x < s; ++x) {
      img.at(y, x, 0) = static_cast<std::uint8_t>(y);
      img.at(y, x, 1) = static_cast<std::uint8_t>(x);
      img.at(y, x, 2) = static_cast<std::uint8_t>((y * 31 + x) & 0xff);
    }
  }
  return img;
}

bool is_pixel_bijection(const cb::ImageTensor& in, const cb::ImageTensor& out) {
  std::set<std::pair<int, int>> seen;
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      const int sy = out.at(y, x, 0), sx = out.at(y, x, 1);
      if (out.at(y, x, 2) != in.at(sy, sx, 2)) return false;
      seen.insert({sy, sx});
    }
  }
  return seen.size() == in.height() * in.width();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gamma

TEST(Gamma, TableMatchesHighPrecisionOracle) {
  for (double g : kGammas) {
    const auto table = cb::make_gamma_table(g);
    for (int x = 0; x < 256; ++x) {
      ASSERT_EQ(table[x], cb::testing::gamma_reference(x, g)) << "gamma " << g << " x " << x;
    }
  }
}

TEST(Gamma, WorkedValues) {
  EXPECT_EQ(cb::make_gamma_table(0.2)[64], 193);
  EXPECT_EQ(cb::make_gamma_table(5.0)[128], 8);
  EXPECT_EQ(cb::testing::gamma_reference(64, 0.2), 193);
  EXPECT_EQ(cb::testing::gamma_reference(128, 5.0), 8);
}

TEST(Gamma, EndpointsFixedAndMonotone) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> g(0.05, 8.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double gamma = g(gen);
    const auto t = cb::make_gamma_table(gamma);
    EXPECT_EQ(t[0], 0);
    EXPECT_EQ(t[255], 255);
    for (int x = 1; x < 256; ++x) ASSERT_LE(t[x - 1], t[x]) << "gamma " << gamma;
  }
}

TEST(Gamma, OneIsBitwiseIdentity) {
  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 50; ++rep) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{9, 7, 3});
    EXPECT_EQ(cb::gamma_distort(img, 1.0), img);
  }
}

TEST(Gamma, DirectionOfShift) {
  const auto dark = cb::make_gamma_table(5.0), bright = cb::make_gamma_table(0.2);
  for (int x = 1; x < 255; ++x) {
    EXPECT_LE(dark[x], x);
    EXPECT_GE(bright[x], x);
  }
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(cb::make_gamma_table(0.0), cb::ParameterError);
  EXPECT_THROW(cb::make_gamma_table(-1.0), cb::ParameterError);
  EXPECT_THROW(cb::make_gamma_table(std::nan("")), cb::ParameterError);
}

// ---------------------------------------------------------------------------
// Permutations

TEST(PatchPermutation, SizesAndDegenerateCases) {
  EXPECT_EQ(cb::make_patch_permutation(32, 32, 7, cb::ShuffleScope::kGlobal).size(), 1u);
  EXPECT_EQ(cb::make_patch_permutation(32, 1, 7, cb::ShuffleScope::kLocal).size(), 1u);
  EXPECT_EQ(cb::make_patch_permutation(32, 4, 7, cb::ShuffleScope::kGlobal).size(), 64u);
  EXPECT_EQ(cb::make_patch_permutation(32, 4, 7, cb::ShuffleScope::kLocal).size(), 16u);
}

TEST(PatchPermutation, IsBijectionAndDeterministic) {
  const cb::Permutation a = cb::make_patch_permutation(8, 4, 99, cb::ShuffleScope::kGlobal);
  std::vector<std::size_t> sorted = a.mapping();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(a, cb::make_patch_permutation(8, 4, 99, cb::ShuffleScope::kGlobal));
  // Different seeds give different permutations for a big enough grid.
  EXPECT_NE(cb::make_patch_permutation(32, 2, 1, cb::ShuffleScope::kGlobal),
            cb::make_patch_permutation(32, 2, 2, cb::ShuffleScope::kGlobal));
}

TEST(PatchPermutation, DivisibilityError) {
  EXPECT_THROW(cb::make_patch_permutation(32, 5, 0, cb::ShuffleScope::kGlobal), cb::ParameterError);
  EXPECT_THROW(cb::make_patch_permutation(32, 0, 0, cb::ShuffleScope::kLocal), cb::ParameterError);
}

TEST(Permutation, InverseAndValidation) {
  std::mt19937_64 gen(13);
  const cb::Permutation p = random_permutation(gen, 20);
  const cb::Permutation inv = p.inverse();
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(inv[p[i]], i);
  EXPECT_TRUE(cb::Permutation::identity(5).is_identity());
  EXPECT_THROW(cb::Permutation(std::vector<std::size_t>{0, 0, 1}), cb::ParameterError);
  EXPECT_THROW(cb::Permutation(std::vector<std::size_t>{0, 3}), cb::ParameterError);
}

// ---------------------------------------------------------------------------
// Shuffles

TEST(GlobalShuffle, MatchesDefinitionOracle) {
  std::mt19937_64 gen(14);
  for (std::size_t p : {1u, 2u, 4u, 8u}) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{16, 16, 3});
    const cb::Permutation perm = random_permutation(gen, (16 / p) * (16 / p));
    EXPECT_EQ(cb::global_shuffle(img, p, perm), naive_global_shuffle(img, p, perm)) << "p " << p;
  }
}

TEST(LocalShuffle, MatchesDefinitionOracle) {
  std::mt19937_64 gen(15);
  for (std::size_t p : {1u, 2u, 4u, 16u}) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{16, 16, 1});
    const cb::Permutation perm = random_permutation(gen, p * p);
    EXPECT_EQ(cb::local_shuffle(img, p, perm), naive_local_shuffle(img, p, perm)) << "p " << p;
  }
}

TEST(Shuffles, IdentityExtremes) {
  std::mt19937_64 gen(16);
  for (int rep = 0; rep < 20; ++rep) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{12, 12, 3});
    EXPECT_EQ(cb::global_shuffle(img, 12, cb::make_patch_permutation(12, 12, rep, cb::ShuffleScope::kGlobal)), img);
    EXPECT_EQ(cb::local_shuffle(img, 1, cb::make_patch_permutation(12, 1, rep, cb::ShuffleScope::kLocal)), img);
    EXPECT_EQ(cb::global_shuffle(img, 3, cb::Permutation::identity(16)), img);
    EXPECT_EQ(cb::local_shuffle(img, 3, cb::Permutation::identity(9)), img);
  }
}

TEST(Shuffles, FullImageExtremesArePixelBijections) {
  const cb::ImageTensor img = coordinate_image(16);
  const cb::ImageTensor g1 = cb::global_shuffle(img, 1, cb::make_patch_permutation(16, 1, 5, cb::ShuffleScope::kGlobal));
  const cb::ImageTensor ls = cb::local_shuffle(img, 16, cb::make_patch_permutation(16, 16, 5, cb::ShuffleScope::kLocal));
  EXPECT_NE(g1, img);
  EXPECT_NE(ls, img);
  EXPECT_TRUE(is_pixel_bijection(img, g1));
  EXPECT_TRUE(is_pixel_bijection(img, ls));
}

TEST(Shuffles, InverseRecoversOriginal) {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 50; ++rep) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{16, 16, 3});
    const cb::Permutation g = cb::make_patch_permutation(16, 4, rep, cb::ShuffleScope::kGlobal);
    const cb::Permutation l = cb::make_patch_permutation(16, 4, rep, cb::ShuffleScope::kLocal);
    EXPECT_EQ(cb::global_shuffle(cb::global_shuffle(img, 4, g), 4, g.inverse()), img);
    EXPECT_EQ(cb::local_shuffle(cb::local_shuffle(img, 4, l), 4, l.inverse()), img);
  }
}

TEST(Shuffles, PreserveHistograms) {
  std::mt19937_64 gen(18);
  for (int rep = 0; rep < 30; ++rep) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{16, 16, 3});
    const cb::ImageTensor g = cb::global_shuffle(img, 2, cb::make_patch_permutation(16, 2, rep, cb::ShuffleScope::kGlobal));
    const cb::ImageTensor l = cb::local_shuffle(img, 4, cb::make_patch_permutation(16, 4, rep, cb::ShuffleScope::kLocal));
    EXPECT_EQ(cb::testing::channel_histograms(g), cb::testing::channel_histograms(img));
    EXPECT_EQ(cb::testing::channel_histograms(l), cb::testing::channel_histograms(img));
    for (std::size_t by = 0; by < 4; ++by) {
      for (std::size_t bx = 0; bx < 4; ++bx) {
        EXPECT_EQ(cb::testing::block_histograms(l, 4, by, bx), cb::testing::block_histograms(img, 4, by, bx));
      }
    }
  }
}

TEST(Shuffles, ShapeErrors) {
  std::mt19937_64 gen(19);
  const cb::ImageTensor rect = random_image(gen, cb::ImageShape{8, 6, 3});
  EXPECT_THROW(cb::global_shuffle(rect, 2, cb::Permutation::identity(12)), cb::ParameterError);
  const cb::ImageTensor sq = random_image(gen, cb::ImageShape{8, 8, 3});
  EXPECT_THROW(cb::global_shuffle(sq, 3, cb::Permutation::identity(4)), cb::ParameterError);
  EXPECT_THROW(cb::global_shuffle(sq, 4, cb::Permutation::identity(3)), cb::ParameterError);
  EXPECT_THROW(cb::local_shuffle(sq, 4, cb::Permutation::identity(4)), cb::ParameterError);
}

TEST(PreparedCorruption, SharedLocalPermutationAcrossImages) {
  std::mt19937_64 gen(20);
  cb::CorruptionSpec spec;
  spec.kind = cb::CorruptionKind::kLocalShuffle;
  spec.patch = 4;
  spec.seed = 123;
  const cb::PreparedCorruption prep(spec, cb::ImageShape{16, 16, 3});
  const cb::Permutation& perm = prep.permutation();
  EXPECT_EQ(perm, cb::make_patch_permutation(16, 4, 123, cb::ShuffleScope::kLocal));
  for (int rep = 0; rep < 5; ++rep) {
    const cb::ImageTensor img = random_image(gen, cb::ImageShape{16, 16, 3});
    EXPECT_EQ(prep.apply(img), naive_local_shuffle(img, 4, perm));
  }
}

TEST(ApplyCorruption, ImageLevelMatchesPerImageCalls) {
  std::mt19937_64 gen(21);
  const cb::LabeledDataset ds = random_dataset(gen, 10, cb::ImageShape{8, 8, 3}, 2);
  cb::CorruptionSpec spec;
  spec.kind = cb::CorruptionKind::kGlobalShuffle;
  spec.patch = 2;
  spec.seed = 9;
  const cb::LabeledDataset out = cb::apply_corruption(ds, spec);
  const cb::Permutation perm = cb::make_patch_permutation(8, 2, 9, cb::ShuffleScope::kGlobal);
  ASSERT_EQ(out.size(), ds.size());
  EXPECT_EQ(out.labels(), ds.labels());
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(out.image(i), cb::global_shuffle(ds.image(i), 2, perm));
}

TEST(CorruptionSpec, DefaultLabels) {
  cb::CorruptionSpec s;
  s.gamma = 5.0;
  EXPECT_EQ(s.default_label(), "gamma5");
  s.kind = cb::CorruptionKind::kGlobalShuffle;
  s.patch = 4;
  EXPECT_EQ(s.default_label(), "G4x4");
  s.kind = cb::CorruptionKind::kLocalShuffle;
  EXPECT_EQ(s.default_label(), "L4x4");
  s.kind = cb::CorruptionKind::kLongTailSubsample;
  s.max_per_class = 1280;
  s.min_per_class = 5;
  EXPECT_EQ(s.default_label(), "LT1280-5");
  s.label = "custom";
  EXPECT_EQ(s.display_label(), "custom");
}

// ---------------------------------------------------------------------------
// Dataset level

TEST(LongTail, RankCountsMatchFormula) {
  EXPECT_EQ(cb::longtail_rank_counts(2, 100, 5), (std::vector<std::size_t>{100, 5}));
  const auto counts = cb::longtail_rank_counts(10, 1280, 5);
  ASSERT_EQ(counts.size(), 10u);
  EXPECT_EQ(counts.front(), 1280u);
  EXPECT_EQ(counts.back(), 5u);
  for (std::size_t k = 0; k < 10; ++k) {
    const long double v = 1280.0L * std::pow(5.0L / 1280.0L, static_cast<long double>(k) / 9.0L);
    EXPECT_EQ(counts[k], static_cast<std::size_t>(std::llround(v))) << "rank " << k;
    if (k > 0) {
      EXPECT_LT(counts[k], counts[k - 1]);
    }
  }
  EXPECT_EQ(cb::longtail_rank_counts(4, 7, 7), (std::vector<std::size_t>{7, 7, 7, 7}));
}

TEST(LongTail, SubsampleProfileAndOrder) {
  std::mt19937_64 gen(22);
  const cb::LabeledDataset ds = random_dataset(gen, 500, cb::ImageShape{2, 2, 1}, 5);
  const cb::SubsampleResult r = cb::longtail_subsample(ds, 100, 5, 42);
  const auto ranks = cb::longtail_rank_counts(5, 100, 5);
  ASSERT_EQ(r.ranking.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(r.profile.counts[r.ranking[k]], ranks[k]);
  EXPECT_EQ(r.dataset.label_histogram(), r.profile.counts);
  // Selected images keep their original relative order and content.
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < r.dataset.size(); ++i) {
    while (cursor < ds.size() && !(ds.image(cursor) == r.dataset.image(i) && ds.label(cursor) == r.dataset.label(i))) {
      ++cursor;
    }
    ASSERT_LT(cursor, ds.size()) << "output row " << i << " is not an in-order input row";
    ++cursor;
  }
  const cb::SubsampleResult again = cb::longtail_subsample(ds, 100, 5, 42);
  EXPECT_EQ(again.dataset, r.dataset);
}

TEST(LongTail, FlatProfileIsUniformSubsample) {
  std::mt19937_64 gen(23);
  const cb::LabeledDataset ds = random_dataset(gen, 60, cb::ImageShape{2, 2, 1}, 3);
  const cb::SubsampleResult r = cb::longtail_subsample(ds, 7, 7, 1);
  EXPECT_EQ(r.dataset.label_histogram(), (std::vector<std::size_t>{7, 7, 7}));
  const cb::SubsampleResult u = cb::uniform_subsample(ds, 7, 1);
  EXPECT_EQ(u.dataset.label_histogram(), (std::vector<std::size_t>{7, 7, 7}));
}

TEST(LongTail, CapacityErrorNamesClass) {
  std::mt19937_64 gen(24);
  const cb::LabeledDataset ds = random_dataset(gen, 30, cb::ImageShape{2, 2, 1}, 3);
  try {
    cb::longtail_subsample(ds, 20, 5, 0);
    FAIL() << "expected CapacityError";
  } catch (const cb::CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("class "), std::string::npos);
  }
  EXPECT_THROW(cb::longtail_subsample(ds, 3, 5, 0), cb::ParameterError);
}

TEST(Substitute, SelfAndCompatibility) {
  std::mt19937_64 gen(25);
  const cb::LabeledDataset a = random_dataset(gen, 100, cb::ImageShape{4, 4, 3}, 10);
  EXPECT_EQ(cb::substitute_dataset(a, a), a);
  const cb::LabeledDataset b = random_dataset(gen, 100, cb::ImageShape{4, 4, 3}, 10);
  EXPECT_EQ(a.label_histogram(), b.label_histogram());
  EXPECT_EQ(cb::substitute_dataset(a, b), b);
  const cb::LabeledDataset nine = random_dataset(gen, 90, cb::ImageShape{4, 4, 3}, 9);
  EXPECT_THROW(cb::substitute_dataset(a, nine), cb::CompatibilityError);
  const cb::LabeledDataset shape = random_dataset(gen, 100, cb::ImageShape{4, 4, 1}, 10);
  EXPECT_THROW(cb::substitute_dataset(a, shape), cb::CompatibilityError);
  const cb::LabeledDataset small = random_dataset(gen, 50, cb::ImageShape{4, 4, 3}, 10);
  EXPECT_THROW(cb::substitute_dataset(a, small, 0.05), cb::CompatibilityError);
  EXPECT_NO_THROW(cb::substitute_dataset(a, small, 0.5));
}
