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

#include <algorithm>
#include <cmath>
#include <vector>

#include "qe/errors.hpp"
#include "qe/parallel.hpp"
#include "qe/random.hpp"
#include "qe/ter_align.hpp"

namespace qe {
namespace {

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                "vectors differ in length: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::vector<double> Column(const Matrix& m, Eigen::Index c) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
  return out;
}

void CheckEditShapes(const Matrix& pred, const Matrix& gold) {
  if (pred.cols() != Eigen::Index(kNumEditOps) || gold.cols() != Eigen::Index(kNumEditOps)) {
    throw Error(ErrorCode::kDimensionMismatch, "edit matrices must have 4 columns");
  }
  CheckLengths(static_cast<std::size_t>(pred.rows()), static_cast<std::size_t>(gold.rows()));
}

}  // namespace

double Pearson(std::span<const double> a, std::span<const double> b) {
  CheckLengths(a.size(), b.size());
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorCode::kZeroVariance, "need at least 2 values");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw Error(ErrorCode::kZeroVariance, "constant input");
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double RSquared(std::span<const double> pred, std::span<const double> gold) {
  CheckLengths(pred.size(), gold.size());
  const std::size_t n = gold.size();
  if (n < 2) throw Error(ErrorCode::kZeroVariance, "need at least 2 values");
  double mean = 0.0;
  for (double g : gold) mean += g;
  mean /= double(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += (gold[i] - pred[i]) * (gold[i] - pred[i]);
    ss_tot += (gold[i] - mean) * (gold[i] - mean);
  }
  if (ss_tot <= 0.0) throw Error(ErrorCode::kZeroVariance, "gold values are constant");
  return 1.0 - ss_res / ss_tot;
}

double RSquaredColumns(const Matrix& pred, const Matrix& gold) {
  if (pred.cols() != gold.cols() || pred.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction and gold column counts differ");
  }
  double sum = 0.0;
  for (Eigen::Index c = 0; c < pred.cols(); ++c) {
    const auto p = Column(pred, c), g = Column(gold, c);
    try {
      sum += RSquared(p, g);
    } catch (const Error& e) {
      throw Error(e.code(), "column " + std::to_string(c) + ": " + e.message(),
                  static_cast<std::size_t>(c));
    }
  }
  return sum / double(pred.cols());
}

double RhoEdits(const Matrix& pred, const Matrix& gold) {
  CheckEditShapes(pred, gold);
  double product = 1.0;
  for (Eigen::Index c = 0; c < Eigen::Index(kNumEditOps); ++c) {
    const auto p = Column(pred, c), g = Column(gold, c);
    try {
      product *= Pearson(p, g);
    } catch (const Error& e) {
      throw Error(e.code(),
                  std::string(kEditOpNames[static_cast<std::size_t>(c)]) + " column: " + e.message(),
                  static_cast<std::size_t>(c));
    }
  }
  return product;
}

double RhoHter(const Matrix& pred, std::span<const double> gold_hter,
               std::span<const int> denominators) {
  if (pred.cols() != Eigen::Index(kNumEditOps)) {
    throw Error(ErrorCode::kDimensionMismatch, "edit predictions must have 4 columns");
  }
  CheckLengths(static_cast<std::size_t>(pred.rows()), gold_hter.size());
  CheckLengths(gold_hter.size(), denominators.size());
  std::vector<double> assembled(gold_hter.size());
  for (std::size_t i = 0; i < assembled.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    assembled[i] = AssembleHter(PredictedEdits{pred(r, 0), pred(r, 1), pred(r, 2), pred(r, 3)},
                                denominators[i]);
  }
  return Pearson(assembled, gold_hter);
}

EvalReport Evaluate(const EvalInputs& in) {
  // A measure that is undefined on these inputs (constant vector) is left
  // unset; every other error propagates.
  auto measure = [](std::optional<double>& slot, auto&& compute) {
    try {
      slot = compute();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroVariance) throw;
      slot.reset();
    }
  };
  EvalReport report;
  report.n = in.gold_hter.size();
  if (!in.pred_hter.empty()) {
    CheckLengths(in.pred_hter.size(), in.gold_hter.size());
    measure(report.rho, [&] { return Pearson(in.pred_hter, in.gold_hter); });
    measure(report.r2, [&] { return RSquared(in.pred_hter, in.gold_hter); });
  }
  if (in.pred_edits && in.gold_edits) {
    measure(report.rho_edits, [&] { return RhoEdits(*in.pred_edits, *in.gold_edits); });
  }
  if (in.pred_edits && !in.denominators.empty()) {
    measure(report.rho_hter, [&] { return RhoHter(*in.pred_edits, in.gold_hter, in.denominators); });
  }
  return report;
}

SignificanceResult BootstrapSignificance(std::span<const double> pred_a,
                                         std::span<const double> pred_b,
                                         std::span<const double> gold, int n_samples,
                                         double alpha, std::uint64_t seed, int jobs) {
  CheckLengths(pred_a.size(), gold.size());
  CheckLengths(pred_b.size(), gold.size());
  const std::size_t n = gold.size();
  if (n < 10) {
    throw Error(ErrorCode::kTooFewSamples,
                "bootstrap needs at least 10 items, got " + std::to_string(n));
  }
  if (n_samples <= 0) throw Error(ErrorCode::kInvalidArgument, "n_samples must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0,1)");

  std::vector<char> wins(static_cast<std::size_t>(n_samples), 0);
  ParallelFor(wins.size(), jobs, [&](std::size_t s) {
    Rng rng(DeriveSeed(seed, s));
    std::vector<double> a(n), b(n), g(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(UniformIndex(rng, n));
      a[k] = pred_a[idx];
      b[k] = pred_b[idx];
      g[k] = gold[idx];
    }
    try {
      wins[s] = Pearson(a, g) > Pearson(b, g) ? 1 : 0;
    } catch (const Error&) {
      wins[s] = 0;  // degenerate resample
    }
  });

  long total = 0;
  for (char w : wins) total += w;
  SignificanceResult r;
  r.n_samples = n_samples;
  r.alpha = alpha;
  r.win_fraction = double(total) / double(n_samples);
  r.significant = r.win_fraction >= 1.0 - alpha;
  return r;
}

}  // namespace qe
