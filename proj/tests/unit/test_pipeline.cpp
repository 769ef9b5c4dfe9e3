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

#include <random>

#include "corrupt_bench/augment.hpp"
#include "corrupt_bench/config_text.hpp"
#include "corrupt_bench/corruptions.hpp"
#include "corrupt_bench/error.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/pipeline.hpp"
#include "corrupt_bench/rng.hpp"
#include "oracles.hpp"

namespace cb = corrupt_bench;
using cb::testing::random_dataset;
using cb::testing::random_image;

namespace {

cb::CorruptionSpec global(std::size_t p, std::uint64_t seed) {
  cb::CorruptionSpec s;
  s.kind = cb::CorruptionKind::kGlobalShuffle;
  s.patch = p;
  s.seed = seed;
  return s;
}

cb::AugmentationSpec crop(std::size_t padding) {
  cb::AugmentationSpec a;
  a.kind = cb::AugmentationKind::kRandomCrop;
  a.padding = padding;
  return a;
}

class ThreadLimitGuard {
 public:
  explicit ThreadLimitGuard(std::size_t n) : saved_(cb::thread_limit()) { cb::set_thread_limit(n); }
  ~ThreadLimitGuard() { cb::set_thread_limit(saved_); }

 private:
  std::size_t saved_;
};

}  // namespace

TEST(Pipeline, EmptyIsIdentity) {
  std::mt19937_64 gen(31);
  const cb::LabeledDataset ds = random_dataset(gen, 20, cb::ImageShape{8, 8, 3}, 4);
  EXPECT_EQ(cb::apply_pipeline(ds, cb::TransformPipeline{}, 0), ds);
  EXPECT_EQ(cb::apply_pipeline(ds, cb::TransformPipeline{}, 7), ds);
}

TEST(Pipeline, SingleStageEqualsDirectCall) {
  std::mt19937_64 gen(32);
  const cb::LabeledDataset ds = random_dataset(gen, 20, cb::ImageShape{8, 8, 3}, 4);
  cb::TransformPipeline pipe;
  pipe.stages.emplace_back(global(2, 77));
  const cb::LabeledDataset out = cb::apply_pipeline(ds, pipe, 0);
  const cb::Permutation perm = cb::make_patch_permutation(8, 2, 77, cb::ShuffleScope::kGlobal);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(out.image(i), cb::global_shuffle(ds.image(i), 2, perm));
  EXPECT_EQ(out.labels(), ds.labels());
}

TEST(Pipeline, OrderMatters) {
  std::mt19937_64 gen(33);
  const cb::LabeledDataset ds = random_dataset(gen, 8, cb::ImageShape{16, 16, 3}, 2);
  const auto a = cb::TransformPipeline::ordered({global(4, 5)}, {crop(2)}, cb::PipelineMode::kCorruptThenAugment, 9);
  const auto b = cb::TransformPipeline::ordered({global(4, 5)}, {crop(2)}, cb::PipelineMode::kAugmentThenCorrupt, 9);
  ASSERT_TRUE(std::holds_alternative<cb::CorruptionSpec>(a.stages[0]));
  ASSERT_TRUE(std::holds_alternative<cb::AugmentationSpec>(b.stages[0]));
  const cb::LabeledDataset oa = cb::apply_pipeline(ds, a, 0);
  const cb::LabeledDataset ob = cb::apply_pipeline(ds, b, 0);
  bool differs = false;
  for (std::size_t i = 0; i < ds.size(); ++i) differs = differs || !(oa.image(i) == ob.image(i));
  EXPECT_TRUE(differs);
}

TEST(Pipeline, AugmentationsVaryByEpochButCorruptionsDoNot) {
  std::mt19937_64 gen(34);
  const cb::LabeledDataset ds = random_dataset(gen, 16, cb::ImageShape{16, 16, 3}, 2);
  const auto aug = cb::TransformPipeline::ordered({}, {crop(3)}, cb::PipelineMode::kCorruptThenAugment, 1);
  EXPECT_NE(cb::apply_pipeline(ds, aug, 0), cb::apply_pipeline(ds, aug, 1));
  EXPECT_EQ(cb::apply_pipeline(ds, aug, 1), cb::apply_pipeline(ds, aug, 1));
  const auto cor = cb::TransformPipeline::ordered({global(4, 5)}, {}, cb::PipelineMode::kCorruptThenAugment, 1);
  EXPECT_EQ(cb::apply_pipeline(ds, cor, 0), cb::apply_pipeline(ds, cor, 3));
}

TEST(Pipeline, DeterministicAcrossThreadCounts) {
  std::mt19937_64 gen(35);
  const cb::LabeledDataset ds = random_dataset(gen, 101, cb::ImageShape{16, 16, 3}, 5);
  cb::AugmentationSpec flip;
  flip.kind = cb::AugmentationKind::kHorizontalFlip;
  cb::AugmentationSpec jitter;
  jitter.kind = cb::AugmentationKind::kColorJitter;
  jitter.prob = 0.8;
  const auto pipe = cb::TransformPipeline::ordered({global(4, 3)}, {crop(2), flip, jitter},
                                                   cb::PipelineMode::kAugmentThenCorrupt, 17);
  cb::LabeledDataset one, many;
  {
    ThreadLimitGuard g(1);
    one = cb::apply_pipeline(ds, pipe, 2);
  }
  {
    ThreadLimitGuard g(8);
    many = cb::apply_pipeline(ds, pipe, 2);
  }
  EXPECT_EQ(one, many);
}

TEST(Pipeline, DatasetLevelStagesRunInPlace) {
  std::mt19937_64 gen(36);
  const cb::LabeledDataset ds = random_dataset(gen, 60, cb::ImageShape{8, 8, 3}, 3);
  const cb::TransformPipeline pipe = cb::parse_pipeline(
      "stage = uniform_subsample(per_class=4, seed=2)\nstage = gamma(gamma=2)\n", 0);
  const cb::LabeledDataset out = cb::apply_pipeline(ds, pipe, 0);
  EXPECT_EQ(out.label_histogram(), (std::vector<std::size_t>{4, 4, 4}));
  cb::CorruptionSpec uf;
  uf.kind = cb::CorruptionKind::kUniformSubsample;
  uf.per_class = 4;
  uf.seed = 2;
  const cb::LabeledDataset sub = cb::apply_corruption(ds, uf);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out.image(i), cb::gamma_distort(sub.image(i), 2.0));
}

TEST(Pipeline, StageErrorsCarryIndex) {
  std::mt19937_64 gen(37);
  const cb::LabeledDataset ds = random_dataset(gen, 4, cb::ImageShape{8, 8, 3}, 2);
  cb::TransformPipeline pipe;
  pipe.stages.emplace_back(global(2, 1));
  pipe.stages.emplace_back(global(3, 1));
  try {
    cb::apply_pipeline(ds, pipe, 0);
    FAIL() << "expected an error";
  } catch (const cb::Error& e) {
    EXPECT_EQ(e.exit_code(), 2);
    EXPECT_NE(std::string(e.what()).find("stage 1"), std::string::npos) << e.what();
  }
}

TEST(PipelineText, ParseFormatRoundTrip) {
  const std::string text =
      "mode = augment_then_corrupt\n"
      "seed = 12\n"
      "stage = random_crop(padding=2)\n"
      "stage = hflip(prob=0.5)\n"
      "stage = global_shuffle(p=4, seed=99, label=G4)\n"
      "stage = gamma(gamma=0.2)\n"
      "stage = longtail(max=100, min=5)\n";
  const cb::TransformPipeline pipe = cb::parse_pipeline(text, 1);
  EXPECT_EQ(pipe.seed, 12u);
  EXPECT_EQ(pipe.mode, cb::PipelineMode::kAugmentThenCorrupt);
  ASSERT_EQ(pipe.stages.size(), 5u);
  const auto& g = std::get<cb::CorruptionSpec>(pipe.stages[2]);
  EXPECT_EQ(g.seed, 99u);
  EXPECT_EQ(g.display_label(), "G4");
  EXPECT_EQ(std::get<cb::CorruptionSpec>(pipe.stages[4]).seed, cb::derive_seed(12, 4));
  const std::string canonical = cb::format_pipeline(pipe);
  EXPECT_EQ(cb::format_pipeline(cb::parse_pipeline(canonical, 0)), canonical);
}

TEST(PipelineText, Errors) {
  EXPECT_THROW(cb::parse_pipeline("stage = blur(sigma=1)\n", 0), cb::ConfigError);
  EXPECT_THROW(cb::parse_pipeline("stage = gamma()\n", 0), cb::ConfigError);
  EXPECT_THROW(cb::parse_pipeline("stage = gamma(gamma=2, bogus=1)\n", 0), cb::ConfigError);
  EXPECT_THROW(cb::parse_pipeline("colour = red\n", 0), cb::ConfigError);
  EXPECT_THROW(cb::parse_pipeline("stage = gamma(gamma=abc)\n", 0), cb::ConfigError);
  EXPECT_THROW(cb::parse_pipeline("mode = sideways\n", 0), cb::ConfigError);
}

TEST(ConfigText, CallParsing) {
  const cb::CallExpr c = cb::parse_call("knn(k=50, tau=0.07)");
  EXPECT_EQ(c.name, "knn");
  EXPECT_EQ(c.get_size("k", 0), 50u);
  EXPECT_DOUBLE_EQ(c.get_double("tau", 0.0), 0.07);
  EXPECT_EQ(cb::parse_call("none").name, "none");
  EXPECT_THROW(cb::parse_call("knn(k=50"), cb::ConfigError);
  EXPECT_THROW(c.require_known({"k"}), cb::ConfigError);
  const auto lines = cb::parse_config_lines("# comment\n\nseed = 3 # trailing\n");
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].key, "seed");
  EXPECT_EQ(lines[0].value, "3");
  EXPECT_EQ(cb::format_number(0.1), "0.1");
}

// ---------------------------------------------------------------------------
// Augmentations

TEST(Augment, FlipIsInvolution) {
  std::mt19937_64 gen(38);
  const cb::ImageTensor img = random_image(gen, cb::ImageShape{6, 5, 3});
  const cb::ImageTensor f = cb::horizontal_flip(img);
  EXPECT_EQ(f.at(2, 0, 1), img.at(2, 4, 1));
  EXPECT_EQ(cb::horizontal_flip(f), img);
}

TEST(Augment, CropKeepsShapeAndZeroPaddingIsIdentity) {
  std::mt19937_64 gen(39);
  const cb::ImageTensor img = random_image(gen, cb::ImageShape{10, 10, 3});
  cb::Rng rng(1);
  EXPECT_EQ(cb::random_crop(img, 0, rng), img);
  for (int rep = 0; rep < 20; ++rep) EXPECT_EQ(cb::random_crop(img, 3, rng).shape(), img.shape());
}

TEST(Augment, GrayscaleAndResize) {
  std::mt19937_64 gen(40);
  const cb::ImageTensor img = random_image(gen, cb::ImageShape{8, 8, 3});
  const cb::ImageTensor g = cb::to_grayscale(img);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      EXPECT_EQ(g.at(y, x, 0), g.at(y, x, 1));
      EXPECT_EQ(g.at(y, x, 1), g.at(y, x, 2));
    }
  }
  EXPECT_EQ(cb::resize_bilinear(img, 8), img);
  EXPECT_EQ(cb::resize_bilinear(img, 20).shape(), (cb::ImageShape{20, 20, 3}));
  cb::ImageTensor flat(cb::ImageShape{4, 4, 1});
  for (auto& v : flat.mutable_data()) v = 77;
  const cb::ImageTensor big = cb::resize_bilinear(flat, 9);
  for (auto v : big.data()) EXPECT_EQ(v, 77);
}

TEST(Augment, JitterWithZeroProbabilityIsIdentity) {
  std::mt19937_64 gen(41);
  const cb::ImageTensor img = random_image(gen, cb::ImageShape{8, 8, 3});
  cb::Rng rng(3);
  EXPECT_EQ(cb::color_jitter(img, 0.4, 0.0, rng), img);
  EXPECT_EQ(cb::color_jitter(img, 0.0, 1.0, rng), img);
}

TEST(Rng, IndependentOfStandardDistributions) {
  cb::Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform_index(7), b.uniform_index(7));
  cb::Rng c(6);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  static_assert(cb::derive_seed(1, 2) != cb::derive_seed(2, 1));
}
