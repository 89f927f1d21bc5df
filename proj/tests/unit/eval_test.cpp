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
#include "qe/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "qe/errors.hpp"

namespace qe {
namespace {

using V = std::vector<double>;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected qe::Error";
  return ErrorCode::kFormatError;
}

// Textbook two-pass formula, kept separate from the library version.
double ReferencePearson(const V& a, const V& b) {
  const double n = double(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - sa / n) * (a[i] - sa / n);
    sbb += (b[i] - sb / n) * (b[i] - sb / n);
    sab += (a[i] - sa / n) * (b[i] - sb / n);
  }
  return sab / std::sqrt(saa * sbb);
}

V RandomVec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  V v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

TEST(PearsonTest, Examples) {
  const V a = {1, 2, 3, 5};
  V neg;
  for (double x : a) neg.push_back(-x);
  EXPECT_NEAR(Pearson(a, a), 1.0, 1e-15);
  EXPECT_NEAR(Pearson(a, neg), -1.0, 1e-15);
  // 3 / sqrt(2 * 14/3)
  EXPECT_NEAR(Pearson(V{1, 2, 3}, V{1, 2, 4}), 3.0 / std::sqrt(28.0 / 3.0), 1e-15);
  EXPECT_NEAR(Pearson(V{1, 2, 3}, V{1, 2, 4}), 0.98198, 1e-5);
}

TEST(PearsonTest, Errors) {
  EXPECT_EQ(CodeOf([] { Pearson(V{1, 1, 1}, V{1, 2, 3}); }), ErrorCode::kZeroVariance);
  EXPECT_EQ(CodeOf([] { Pearson(V{1, 2}, V{1, 2, 3}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([] { Pearson(V{1}, V{1}); }), ErrorCode::kZeroVariance);
}

TEST(PearsonTest, AffineInvariance) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const V a = RandomVec(rng, 30), b = RandomVec(rng, 30);
    V at;
    for (double x : a) at.push_back(3.5 * x - 2.0);
    EXPECT_NEAR(Pearson(at, b), Pearson(a, b), 1e-12);
    EXPECT_NEAR(Pearson(a, b), ReferencePearson(a, b), 1e-12);
  }
}

TEST(RSquaredTest, Examples) {
  const V gold = {1, 4, 2, 8};
  EXPECT_EQ(RSquared(gold, gold), 1.0);
  EXPECT_NEAR(RSquared(V(4, 3.75), gold), 0.0, 1e-15);
  EXPECT_EQ(RSquared(V{0, 0}, V{-1, 1}), 0.0);
  EXPECT_EQ(CodeOf([] { RSquared(V{1, 2}, V{3, 3}); }), ErrorCode::kZeroVariance);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const V p = RandomVec(rng, 10), g = RandomVec(rng, 10);
    EXPECT_LT(RSquared(p, g), 1.0);
  }
}

TEST(RhoEditsTest, ProductOfColumns) {
  std::mt19937_64 rng(4);
  Matrix gold(12, 4), pred(12, 4);
  for (Eigen::Index i = 0; i < gold.size(); ++i) {
    gold.data()[i] = std::round(5.0 * std::abs(std::normal_distribution<double>()(rng)));
    pred.data()[i] = gold.data()[i] + std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  EXPECT_NEAR(RhoEdits(gold, gold), 1.0, 1e-12);
  Matrix flipped = gold;
  flipped.col(2) *= -1.0;
  EXPECT_NEAR(RhoEdits(flipped, gold), -1.0, 1e-12);
  double product = 1.0;
  for (int k = 0; k < 4; ++k) {
    V p, g;
    for (int i = 0; i < 12; ++i) {
      p.push_back(pred(i, k));
      g.push_back(gold(i, k));
    }
    product *= ReferencePearson(p, g);
  }
  EXPECT_NEAR(RhoEdits(pred, gold), product, 1e-12);
}

TEST(RhoEditsTest, ConstantPredictionColumnIsError) {
  Matrix gold(4, 4), pred(4, 4);
  gold << 1, 0, 2, 0, 0, 1, 1, 1, 3, 2, 0, 0, 1, 1, 5, 2;
  pred = gold;
  pred.col(3).setConstant(0.5);
  try {
    RhoEdits(pred, gold);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
    EXPECT_EQ(e.index(), std::optional<std::size_t>(3));
  }
}

TEST(RhoHterTest, Examples) {
  Matrix gold(5, 4);
  gold << 1, 0, 2, 0, 0, 1, 1, 1, 3, 2, 0, 0, 1, 1, 5, 2, 0, 0, 0, 1;
  const std::vector<int> ref = {6, 4, 9, 10, 3};
  V gold_hter;
  for (int i = 0; i < 5; ++i) gold_hter.push_back(gold.row(i).sum() / ref[std::size_t(i)]);
  EXPECT_NEAR(RhoHter(gold, gold_hter, ref), 1.0, 1e-12);
  EXPECT_NEAR(RhoHter(2.0 * gold, gold_hter, ref), 1.0, 1e-12);
  Matrix pred = gold;
  pred(0, 0) = -1.5;
  pred(3, 2) = 2.25;
  V assembled;
  for (int i = 0; i < 5; ++i) assembled.push_back(pred.row(i).sum() / ref[std::size_t(i)]);
  EXPECT_NEAR(RhoHter(pred, gold_hter, ref), ReferencePearson(assembled, gold_hter), 1e-12);
}

TEST(EvaluateTest, Report) {
  const V gold = {0.1, 0.5, 0.2, 0.9};
  EvalInputs in;
  in.pred_hter = gold;
  in.gold_hter = gold;
  const auto r = Evaluate(in);
  EXPECT_NEAR(*r.rho, 1.0, 1e-12);
  EXPECT_EQ(*r.r2, 1.0);
  EXPECT_FALSE(r.rho_edits);
  EXPECT_FALSE(r.rho_hter);
  EXPECT_EQ(r.n, 4u);
}

TEST(EvaluateTest, UndefinedMeasuresAreUnset) {
  const V gold = {0.1, 0.5, 0.2, 0.9};
  const V pred = {0.3, 0.4, 0.2, 0.6};
  Matrix pred_edits(4, 4), gold_edits(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      pred_edits(i, k) = i * (k + 1) + 0.5 * (i % 2);
      gold_edits(i, k) = k == 3 ? 0.0 : i + k;  // no shifts at all
    }
  }
  EvalInputs in;
  in.pred_hter = pred;
  in.gold_hter = gold;
  in.pred_edits = &pred_edits;
  in.gold_edits = &gold_edits;
  const auto r = Evaluate(in);
  EXPECT_TRUE(r.rho);
  EXPECT_FALSE(r.rho_edits);

  const V shorter = {0.1, 0.2};
  in.pred_hter = shorter;
  EXPECT_THROW(Evaluate(in), Error);
}

TEST(BootstrapTest, IdenticalNeverSignificant) {
  std::mt19937_64 rng(5);
  const V gold = RandomVec(rng, 50), pred = RandomVec(rng, 50);
  const auto r = BootstrapSignificance(pred, pred, gold, 200, 0.05, 9);
  EXPECT_EQ(r.win_fraction, 0.0);
  EXPECT_FALSE(r.significant);
  EXPECT_EQ(r.n_samples, 200);
}

TEST(BootstrapTest, DeterministicAndJobIndependent) {
  std::mt19937_64 rng(6);
  const V gold = RandomVec(rng, 40), a = RandomVec(rng, 40), b = RandomVec(rng, 40);
  const auto r1 = BootstrapSignificance(a, b, gold, 300, 0.05, 17);
  const auto r2 = BootstrapSignificance(a, b, gold, 300, 0.05, 17, 4);
  EXPECT_EQ(r1.win_fraction, r2.win_fraction);
  const auto ab = BootstrapSignificance(a, b, gold, 300, 0.05, 17);
  const auto ba = BootstrapSignificance(b, a, gold, 300, 0.05, 17);
  EXPECT_LE(ab.win_fraction + ba.win_fraction, 1.0);
}

TEST(BootstrapTest, SeparatedSystemsAreSignificant) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const V gold = RandomVec(rng, 200);
    V a = gold, b = gold;
    std::normal_distribution<double> tiny(0.0, 0.01);
    for (auto& x : a) x += tiny(rng);
    std::shuffle(b.begin(), b.end(), rng);
    const auto r = BootstrapSignificance(a, b, gold, 1000, 0.05, seed);
    EXPECT_TRUE(r.significant) << "seed " << seed;
  }
}

TEST(BootstrapTest, Errors) {
  const V small(9, 1.0);
  EXPECT_EQ(CodeOf([&] { BootstrapSignificance(small, small, small, 10, 0.05, 1); }),
            ErrorCode::kTooFewSamples);
}

}  // namespace
}  // namespace qe
