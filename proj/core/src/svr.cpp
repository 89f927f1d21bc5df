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
#include "qe/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qe/errors.hpp"

namespace qe {
namespace {

constexpr double kTau = 1e-12;
constexpr Eigen::Index kMaxGramRows = 4096;

// Kernel values between training rows, either precomputed or on demand.
class KernelSource {
 public:
  KernelSource(const FeatureMatrix& x, double gamma) : x_(x), gamma_(gamma) {
    sq_norms_ = x.rowwise().squaredNorm();
    if (x.rows() <= kMaxGramRows) {
      gram_.resize(x.rows(), x.rows());
      for (Eigen::Index a = 0; a < x.rows(); ++a) {
        for (Eigen::Index b = a; b < x.rows(); ++b) {
          gram_(a, b) = gram_(b, a) = Compute(a, b);
        }
      }
      full_ = true;
    }
  }

  double operator()(Eigen::Index a, Eigen::Index b) const {
    return full_ ? gram_(a, b) : Compute(a, b);
  }

  /// Fills out[k] = K(a, k) for every training row k.
  void Row(Eigen::Index a, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(x_.rows()));
    for (Eigen::Index k = 0; k < x_.rows(); ++k) out[static_cast<std::size_t>(k)] = (*this)(a, k);
  }

 private:
  double Compute(Eigen::Index a, Eigen::Index b) const {
    if (a == b) return 1.0;
    const double d2 = std::max(0.0, sq_norms_(a) + sq_norms_(b) - 2.0 * x_.row(a).dot(x_.row(b)));
    return std::exp(-gamma_ * d2);
  }

  const FeatureMatrix& x_;
  double gamma_;
  Vector sq_norms_;
  Matrix gram_;
  bool full_ = false;
};

}  // namespace

void SvrConfig::Validate() const {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVR C must be positive");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVR epsilon must be >= 0");
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVR gamma must be positive");
  if (!(tol_kkt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVR tol_kkt must be positive");
  if (max_passes < 0) throw Error(ErrorCode::kInvalidArgument, "SVR max_passes must be >= 0");
}

double RbfKernel(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel arguments differ in length");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

SvrModel TrainSvr(const SvrConfig& cfg, const FeatureMatrix& x, std::span<const double> y) {
  cfg.Validate();
  const Eigen::Index n = x.rows();
  if (n < 1) throw Error(ErrorCode::kTooFewRows, "SVR needs at least one row");
  if (static_cast<std::size_t>(n) != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "SVR targets do not match feature rows");
  }
  if (!x.allFinite() || !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::kNonFiniteInput, "SVR training data contain NaN/inf");
  }

  // Variables t < n are alpha_t (sign +1), t >= n are alpha*_{t-n} (sign -1).
  const std::size_t l = 2 * static_cast<std::size_t>(n);
  const double c = cfg.c;
  KernelSource kernel(x, cfg.gamma);
  std::vector<double> beta(l, 0.0), grad(l), linear(l);
  std::vector<int> sign(l);
  auto sample = [n](std::size_t t) { return static_cast<Eigen::Index>(t) % n; };
  for (std::size_t t = 0; t < l; ++t) {
    const bool upper_half = t < static_cast<std::size_t>(n);
    sign[t] = upper_half ? 1 : -1;
    const double yt = y[static_cast<std::size_t>(sample(t))];
    linear[t] = upper_half ? cfg.epsilon - yt : cfg.epsilon + yt;
    grad[t] = linear[t];
  }

  const long max_iter = (cfg.max_passes > 0 ? cfg.max_passes : 10L * n) * n;
  std::vector<double> krow_i, krow_j;
  SvrTrainStats stats;

  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = l, j = l;
    for (std::size_t t = 0; t < l; ++t) {
      const double v = -sign[t] * grad[t];
      const bool in_up = sign[t] > 0 ? beta[t] < c : beta[t] > 0.0;
      const bool in_low = sign[t] > 0 ? beta[t] > 0.0 : beta[t] < c;
      if (in_up && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    stats.kkt_gap = (i == l || j == l) ? 0.0 : gmax - gmin;
    if (i == l || j == l || stats.kkt_gap < cfg.tol_kkt) {
      stats.converged = true;
      break;
    }
    if (stats.iterations >= max_iter) break;
    ++stats.iterations;

    const Eigen::Index si = sample(i), sj = sample(j);
    kernel.Row(si, krow_i);
    kernel.Row(sj, krow_j);
    const double qii = 1.0, qjj = 1.0;  // RBF diagonal
    const double qij = sign[i] * sign[j] * krow_i[static_cast<std::size_t>(sj)];
    const double old_i = beta[i], old_j = beta[j];

    if (sign[i] != sign[j]) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = beta[i] - beta[j];
      beta[i] += delta;
      beta[j] += delta;
      if (diff > 0.0) {
        if (beta[j] < 0.0) {
          beta[j] = 0.0;
          beta[i] = diff;
        }
      } else if (beta[i] < 0.0) {
        beta[i] = 0.0;
        beta[j] = -diff;
      }
      if (diff > 0.0) {
        if (beta[i] > c) {
          beta[i] = c;
          beta[j] = c - diff;
        }
      } else if (beta[j] > c) {
        beta[j] = c;
        beta[i] = c + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = beta[i] + beta[j];
      beta[i] -= delta;
      beta[j] += delta;
      if (sum > c) {
        if (beta[i] > c) {
          beta[i] = c;
          beta[j] = sum - c;
        }
      } else if (beta[j] < 0.0) {
        beta[j] = 0.0;
        beta[i] = sum;
      }
      if (sum > c) {
        if (beta[j] > c) {
          beta[j] = c;
          beta[i] = sum - c;
        }
      } else if (beta[i] < 0.0) {
        beta[i] = 0.0;
        beta[j] = sum;
      }
    }

    const double di = beta[i] - old_i;
    const double dj = beta[j] - old_j;
    for (std::size_t t = 0; t < l; ++t) {
      const auto s = static_cast<std::size_t>(sample(t));
      grad[t] += sign[t] * (sign[i] * krow_i[s] * di + sign[j] * krow_j[s] * dj);
    }
  }

  // Offset from free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  long n_free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = sign[t] * grad[t];
    if (beta[t] >= c) {
      if (sign[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (beta[t] <= 0.0) {
      if (sign[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / double(n_free) : (ub + lb) / 2.0;

  double objective = 0.0;
  for (std::size_t t = 0; t < l; ++t) objective += beta[t] * (grad[t] + linear[t]);
  stats.dual_objective = objective / 2.0;

  SvrModel model;
  model.config = cfg;
  model.stats = stats;
  model.bias = -rho;
  model.n_features = x.cols();
  std::vector<Eigen::Index> sv;
  std::vector<double> coef;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = beta[static_cast<std::size_t>(k)] - beta[static_cast<std::size_t>(k + n)];
    if (a != 0.0) {
      sv.push_back(k);
      coef.push_back(a);
    }
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.dual_coefficients.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
    model.dual_coefficients(static_cast<Eigen::Index>(k)) = coef[k];
  }
  return model;
}

Vector PredictSvr(const SvrModel& model, const FeatureMatrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input has " + std::to_string(x.cols()) + " features, SVR expects " +
                    std::to_string(model.input_dim()));
  }
  const double gamma = model.config.gamma;
  Vector out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < model.support_vectors.rows(); ++k) {
      const double d2 = (model.support_vectors.row(k) - x.row(r)).squaredNorm();
      acc += model.dual_coefficients(k) * std::exp(-gamma * d2);
    }
    out(r) = acc + model.bias;
  }
  return out;
}

}  // namespace qe
