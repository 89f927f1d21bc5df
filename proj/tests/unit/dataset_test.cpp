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
#include "qe/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "qe/errors.hpp"
#include "support/temp_dir.hpp"

namespace qe {
namespace {

using testing::TempDir;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected qe::Error";
  return ErrorCode::kFormatError;
}

TEST(LoadFeaturesTest, Zeros) {
  TempDir dir;
  const auto x = LoadFeatures(dir.Write("f.tsv", "0\t0\t0\n0\t0\t0\n"));
  EXPECT_EQ(x.rows(), 2);
  EXPECT_EQ(x.cols(), 3);
  EXPECT_EQ(x.squaredNorm(), 0.0);
}

TEST(LoadFeaturesTest, DirectParse) {
  std::istringstream in("1.5\t2.0\n3.0\t4.0\n\n");
  const auto x = ParseFeatures(in);
  ASSERT_EQ(x.rows(), 2);
  EXPECT_EQ(x(0, 0), 1.5);
  EXPECT_EQ(x(0, 1), 2.0);
  EXPECT_EQ(x(1, 0), 3.0);
  EXPECT_EQ(x(1, 1), 4.0);
}

TEST(LoadFeaturesTest, Errors) {
  std::istringstream ragged("1\t2\t3\n4\t5\n");
  EXPECT_EQ(CodeOf([&] { ParseFeatures(ragged); }), ErrorCode::kRaggedRows);
  std::istringstream bad("1\t2\n3\tx\n");
  try {
    ParseFeatures(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonNumericCell);
    EXPECT_NE(std::string(e.what()).find("row 2 col 2"), std::string::npos);
  }
  std::istringstream comma("1,5\t2\n");
  EXPECT_EQ(CodeOf([&] { ParseFeatures(comma); }), ErrorCode::kNonNumericCell);
  std::istringstream gap("1\n\n2\n");
  EXPECT_EQ(CodeOf([&] { ParseFeatures(gap); }), ErrorCode::kRaggedRows);
  EXPECT_EQ(CodeOf([] { LoadFeatures("/nonexistent/qe/features.tsv"); }), ErrorCode::kIoError);
}

TEST(LoadFeaturesTest, RoundTripKeepsValues) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 1e3);
  FeatureMatrix x(20, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  std::stringstream ss;
  WriteFeatures(ss, x);
  const auto y = ParseFeatures(ss);
  ASSERT_EQ(y.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(y.data()[i], x.data()[i], std::abs(x.data()[i]) * 1e-12);
  }
}

TEST(LabelsTest, HterAndEdits) {
  TempDir dir;
  const auto h = LoadHterLabels(dir.Write("h", "0.25\n1\n"));
  EXPECT_EQ(h, (std::vector<double>{0.25, 1.0}));
  const auto e = LoadEditLabels(dir.Write("e", "1\t0\t2\t0\n0 0 0 3\n"));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0], (EditCounts{1, 0, 2, 0}));
  EXPECT_EQ(e[1], (EditCounts{0, 0, 0, 3}));
  EXPECT_EQ(CountLabelColumns(dir / "e"), 4);
  EXPECT_EQ(CountLabelColumns(dir / "h"), 1);
  EXPECT_EQ(CodeOf([&] { LoadEditLabels(dir.Write("bad", "1\t0.5\t0\t0\n")); }),
            ErrorCode::kNonNumericCell);
  EXPECT_EQ(CodeOf([&] { LoadEditLabels(dir / "h"); }), ErrorCode::kRaggedRows);
}

TEST(LabelsTest, SentenceLengths) {
  TempDir dir;
  EXPECT_EQ(SentenceLengths(dir.Write("s", "a b c\n\nd\n")), (std::vector<int>{3, 0, 1}));
}

TEST(ScalerTest, ZeroVarianceGuard) {
  FeatureMatrix x(3, 1);
  x << 2, 2, 2;
  const auto s = FitScaler(x);
  EXPECT_EQ(s.means(0), 2.0);
  EXPECT_EQ(s.stds(0), 1.0);
  EXPECT_EQ(ApplyScaler(s, x).squaredNorm(), 0.0);
}

TEST(ScalerTest, PopulationStd) {
  FeatureMatrix x(2, 1);
  x << 0, 2;
  auto s = FitScaler(x);
  EXPECT_DOUBLE_EQ(s.means(0), 1.0);
  EXPECT_DOUBLE_EQ(s.stds(0), 1.0);

  FeatureMatrix y(3, 1);
  y << 1, 2, 3;
  s = FitScaler(y);
  EXPECT_DOUBLE_EQ(s.means(0), 2.0);
  EXPECT_DOUBLE_EQ(s.stds(0), std::sqrt(2.0 / 3.0));
}

TEST(ScalerTest, DirectFormulaAndErrors) {
  Scaler s;
  s.means = Vector::Constant(1, 1.0);
  s.stds = Vector::Constant(1, 2.0);
  FeatureMatrix x(1, 1);
  x << 3;
  EXPECT_EQ(ApplyScaler(s, x)(0, 0), 1.0);
  FeatureMatrix wide(1, 2);
  EXPECT_EQ(CodeOf([&] { ApplyScaler(s, wide); }), ErrorCode::kDimensionMismatch);
  EXPECT_EQ(CodeOf([&] { FitScaler(x); }), ErrorCode::kTooFewRows);
}

TEST(ScalerTest, StandardisesAndIsAffine) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> d(3.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix x(50, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
    const auto s = FitScaler(x);
    const auto z = ApplyScaler(s, x);
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      const double mean = z.col(c).mean();
      const double var = (z.col(c).array() - mean).square().mean();
      EXPECT_LT(std::abs(mean), 1e-9);
      EXPECT_NEAR(var, 1.0, 1e-9);
    }
    // apply(s, a*X + b) == (a*X + b - mean) / std == a * apply(s, X) + (b + (a-1)*mean)/std
    const double a = 2.5, b = -7.0;
    const FeatureMatrix xt = (a * x.array() + b).matrix();
    const auto zt = ApplyScaler(s, xt);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double expected = a * z(r, c) + (b + (a - 1.0) * s.means(c)) / s.stds(c);
        EXPECT_NEAR(zt(r, c), expected, 1e-9);
      }
    }
  }
}

TEST(QeDatasetTest, ValidateAndSubset) {
  QeDataset ds;
  ds.features = FeatureMatrix::Zero(3, 2);
  ds.features(2, 0) = 5.0;
  ds.gold_edits = {{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 1, 1, 0}};
  ds.gold_hter = {0.5, 0.0, 2.0 / 3.0};
  ds.ref_lengths = std::vector<int>{2, 4, 3};
  ds.target_lengths = {2, 4, 3};
  EXPECT_NO_THROW(ds.Validate());
  const std::vector<std::size_t> idx = {2, 0};
  const auto sub = ds.Subset(idx);
  EXPECT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub.features(0, 0), 5.0);
  EXPECT_EQ(sub.gold_edits[1], (EditCounts{1, 0, 0, 0}));
  EXPECT_EQ((*sub.ref_lengths)[0], 3);
  EXPECT_EQ(ds.EditMatrix()(2, 2), 1.0);

  ds.gold_hter[1] = 0.3;
  EXPECT_EQ(CodeOf([&] { ds.Validate(); }), ErrorCode::kFormatError);
  ds.gold_hter.pop_back();
  EXPECT_EQ(CodeOf([&] { ds.Validate(); }), ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace qe
