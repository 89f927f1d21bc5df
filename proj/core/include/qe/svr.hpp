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
#pragma once

#include <span>

#include "qe/types.hpp"

namespace qe {

struct SvrConfig {
  double c = 10.0;
  double epsilon = 0.1;
  double gamma = 0.001;
  double tol_kkt = 1e-3;
  /// Cap on SMO sweeps; one sweep is n working-pair updates. 0 means 10 * n.
  long max_passes = 0;

  void Validate() const;
};

/// Solver diagnostics kept alongside a trained model.
struct SvrTrainStats {
  long iterations = 0;
  double kkt_gap = 0.0;  // maximal violating pair gap at exit
  double dual_objective = 0.0;
  bool converged = false;
};

struct SvrModel {
  Matrix support_vectors;   // one row per support vector
  Vector dual_coefficients; // alpha_i - alpha_i*, within [-C, C]
  double bias = 0.0;
  Eigen::Index n_features = 0;
  SvrConfig config;
  SvrTrainStats stats;

  Eigen::Index input_dim() const { return n_features; }
};

double RbfKernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Epsilon-SVR with an RBF kernel, solved by SMO on the 2n-variable dual
/// with maximal-violating-pair selection (ties go to the lowest index).
/// Targets are used as given.
SvrModel TrainSvr(const SvrConfig& cfg, const FeatureMatrix& x, std::span<const double> y);

/// sum_i coef_i * k(sv_i, x) + bias, per row of `x`.
Vector PredictSvr(const SvrModel& model, const FeatureMatrix& x);

}  // namespace qe
