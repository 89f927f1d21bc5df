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

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "qe/types.hpp"

namespace qe {

/// Pearson product-moment correlation. Throws kLengthMismatch, or
/// kZeroVariance when either side is constant (including n < 2).
double Pearson(std::span<const double> a, std::span<const double> b);

/// Coefficient of determination 1 - SS_res / SS_tot (not squared rho).
double RSquared(std::span<const double> pred, std::span<const double> gold);

/// Mean of per-column R^2 for multi-output predictions.
double RSquaredColumns(const Matrix& pred, const Matrix& gold);

/// Product of the four per-operation Pearson correlations on raw
/// predictions. kZeroVariance carries the failing column as index().
double RhoEdits(const Matrix& pred, const Matrix& gold);

/// Assembles HTER per row from raw predicted counts (no normalisation) and
/// correlates it with `gold_hter`.
double RhoHter(const Matrix& pred, std::span<const double> gold_hter,
               std::span<const int> denominators);

struct EvalReport {
  std::size_t n = 0;
  std::optional<double> rho;        // Pearson(predicted HTER, gold HTER)
  std::optional<double> r2;         // R^2 of predicted HTER
  std::optional<double> rho_edits;  // only with edit predictions and gold edits
  std::optional<double> rho_hter;   // only with edit predictions, raw assembly
};

struct EvalInputs {
  std::span<const double> pred_hter;
  std::span<const double> gold_hter;
  const Matrix* pred_edits = nullptr;  // raw (un-normalised) n x 4
  const Matrix* gold_edits = nullptr;
  std::span<const int> denominators;   // needed for rho_hter
};

EvalReport Evaluate(const EvalInputs& in);

struct SignificanceResult {
  double win_fraction = 0.0;
  double alpha = 0.05;
  bool significant = false;
  int n_samples = 0;
};

/// Paired bootstrap: draws `n_samples` index resamples with replacement and
/// counts those where Pearson(a, gold) > Pearson(b, gold) strictly.
/// Significant iff win_fraction >= 1 - alpha. Resample i uses a seed derived
/// from (seed, i), so results do not depend on `jobs`. Needs n >= 10.
SignificanceResult BootstrapSignificance(std::span<const double> pred_a,
                                         std::span<const double> pred_b,
                                         std::span<const double> gold, int n_samples,
                                         double alpha, std::uint64_t seed, int jobs = 1);

}  // namespace qe
