// Copyright 2026 The qe-hter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qe/tuning.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qe/errors.hpp"
#include "qe/eval.hpp"
#include "support/synthetic.hpp"

namespace qe {
namespace {

using testing::MakeSyntheticCorpus;
using testing::SyntheticSpec;

QeDataset Corpus(int n = 150) {
  SyntheticSpec s;
  s.n = n;
  s.n_features = 6;
  s.seed = 3;
  return MakeSyntheticCorpus(s);
}

GridSpec SmallMlp4Grid() {
  GridSpec g;
  g.variant = VariantKind::kMlp4;
  g.k = 3;
  g.hidden_sizes = {{8}};
  g.activations = {Activation::kRelu};
  g.alphas = {0.1};
  g.tols = {1e-4};
  g.base.mlp4.learning_rate = 0.01;
  g.base.mlp4.max_epochs = 100;
  return g;
}

TEST(MakeFoldsTest, Partition) {
  const auto f = MakeFolds(10, 5, 1);
  ASSERT_EQ(f.size(), 5u);
  for (const auto& fold : f) EXPECT_EQ(fold.size(), 2u);
  for (std::size_t n = 2; n < 40; ++n) {
    for (int k = 2; k <= int(std::min<std::size_t>(n, 7)); ++k) {
      const auto folds = MakeFolds(n, k, n * 31 + std::size_t(k));
      std::set<std::size_t> seen;
      std::size_t lo = n, hi = 0, total = 0;
      for (const auto& fold : folds) {
        lo = std::min(lo, fold.size());
        hi = std::max(hi, fold.size());
        total += fold.size();
        seen.insert(fold.begin(), fold.end());
      }
      EXPECT_EQ(total, n);
      EXPECT_EQ(seen.size(), n);
      EXPECT_EQ(*seen.rbegin(), n - 1);
      EXPECT_LE(hi - lo, 1u);
    }
  }
  EXPECT_EQ(MakeFolds(23, 5, 9), MakeFolds(23, 5, 9));
  EXPECT_NE(MakeFolds(23, 5, 9), MakeFolds(23, 5, 10));
  EXPECT_THROW(MakeFolds(3, 5, 1), Error);
  EXPECT_THROW(MakeFolds(10, 1, 1), Error);
}

TEST(ExpandGridTest, DefaultGridsHoldTunedValues) {
  const auto svm = GridSpec::Default(VariantKind::kSvm);
  EXPECT_EQ(svm.c_values, (std::vector<double>{1, 10}));
  EXPECT_EQ(svm.epsilon_values, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(svm.gamma_values, (std::vector<double>{0.001, 0.01}));
  EXPECT_EQ(ExpandGrid(svm).size(), 8u);
  EXPECT_EQ(svm.measure, Measure::kRhoEdits);
  EXPECT_EQ(svm.k, 5);

  const auto mlp = GridSpec::Default(VariantKind::kMlp4);
  EXPECT_EQ(mlp.hidden_sizes,
            (std::vector<std::vector<int>>{{100}, {300}, {300, 150}, {150, 75, 6}}));
  EXPECT_EQ(mlp.alphas, (std::vector<double>{0.01, 0.1}));
  EXPECT_EQ(mlp.tols, (std::vector<double>{1e-3, 1e-9}));
  EXPECT_EQ(mlp.activations, (std::vector<Activation>{Activation::kRelu, Activation::kTanh}));
  const auto points = ExpandGrid(mlp);
  EXPECT_EQ(points.size(), 32u);
  EXPECT_EQ(points.front().config.mlp4.hidden_sizes, std::vector<int>{100});
  EXPECT_EQ(points[1].config.mlp4.tol, 1e-9);
  EXPECT_EQ(points.back().config.mlp4.hidden_sizes, (std::vector<int>{150, 75, 6}));

  const auto quad = ExpandGrid(GridSpec::Default(VariantKind::kQuadSvm));
  for (const auto& p : quad) {
    for (std::size_t op = 1; op < 4; ++op) EXPECT_EQ(p.config.quad_svm[op].c, p.config.quad_svm[0].c);
  }
}

TEST(GridSearchTest, SingleConfigIsBest) {
  const auto ds = Corpus();
  const auto r = GridSearch(SmallMlp4Grid(), ds);
  ASSERT_EQ(r.grid.size(), 1u);
  EXPECT_EQ(r.best_index, 0u);
  EXPECT_EQ(r.fold_scores[0].size(), 3u);
  EXPECT_DOUBLE_EQ(r.best_score, (r.fold_scores[0][0] + r.fold_scores[0][1] + r.fold_scores[0][2]) / 3.0);
}

TEST(GridSearchTest, TrainedConfigBeatsDegenerate) {
  const auto ds = Corpus(200);
  GridSpec g = SmallMlp4Grid();
  g.measure = Measure::kRhoHter;
  // The first point barely moves from its initialisation.
  g.tols = {1e3, 1e-4};
  g.base.mlp4.learning_rate = 0.01;
  const auto r = GridSearch(g, ds);
  ASSERT_EQ(r.grid.size(), 2u);
  EXPECT_EQ(r.best_index, 1u);
  EXPECT_GT(r.mean_scores[1], r.mean_scores[0]);
}

TEST(GridSearchTest, DeterministicAndJobIndependent) {
  const auto ds = Corpus();
  GridSpec g = SmallMlp4Grid();
  g.alphas = {0.01, 1.0};
  const auto a = GridSearch(g, ds, 1);
  const auto b = GridSearch(g, ds, 3);
  EXPECT_EQ(a.fold_scores, b.fold_scores);
  EXPECT_EQ(a.best_index, b.best_index);
  EXPECT_EQ(a.folds, b.folds);
}

TEST(GridSearchTest, DegenerateFoldScoresNegativeInfinity) {
  auto ds = Corpus(60);
  // Constant shift labels make the per-fold rho undefined.
  for (auto& e : ds.gold_edits) e.shifts = 1;
  ds.gold_hter.clear();
  const auto r = GridSearch(SmallMlp4Grid(), ds);
  for (double s : r.fold_scores[0]) EXPECT_EQ(s, -std::numeric_limits<double>::infinity());
}

TEST(GridSearchTest, SvmVariantsRun) {
  const auto ds = Corpus(80);
  GridSpec g;
  g.variant = VariantKind::kSvm;
  g.k = 2;
  g.c_values = {1.0};
  g.epsilon_values = {0.05};
  g.gamma_values = {0.01, 0.1};
  g.measure = Measure::kR2;
  auto r = GridSearch(g, ds);
  EXPECT_EQ(r.grid.size(), 2u);
  g.variant = VariantKind::kQuadSvm;
  g.measure = Measure::kRhoEdits;
  r = GridSearch(g, ds, 2);
  EXPECT_TRUE(std::isfinite(r.best_score));
}

TEST(GridSearchTest, TrainingErrorsCarryConfig) {
  const auto ds = Corpus(60);
  GridSpec g = SmallMlp4Grid();
  g.alphas = {-1.0};
  try {
    GridSearch(g, ds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("alpha=-1"), std::string::npos) << e.what();
  }
}

TEST(MeasureTest, Names) {
  for (Measure m : {Measure::kR2, Measure::kRhoEdits, Measure::kRhoHter}) {
    EXPECT_EQ(ParseMeasure(MeasureName(m)), m);
  }
  EXPECT_EQ(ParseMeasure("rho_edits"), Measure::kRhoEdits);
}

}  // namespace
}  // namespace qe
