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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qe/pipeline.hpp"

namespace qe {

/// Cross-validation score: R^2 of the predicted amounts, product of the four
/// per-operation rhos, or rho of the HTER assembled from raw predictions.
/// Direct-HTER variants score R2 on HTER and both rho measures as Pearson on
/// HTER.
enum class Measure { kR2, kRhoEdits, kRhoHter };

std::string_view MeasureName(Measure m);
Measure ParseMeasure(std::string_view name);

struct GridSpec {
  VariantKind variant = VariantKind::kMlp4;
  Measure measure = Measure::kRhoEdits;
  int k = 5;
  std::uint64_t seed = 42;
  DenominatorMode denominator = DenominatorMode::kTargetLength;

  // SVR axes (SVM, QUAD_SVM). For QUAD_SVM a grid point applies to all four
  // per-operation models.
  std::vector<double> c_values;
  std::vector<double> epsilon_values;
  std::vector<double> gamma_values;

  // MLP axes (MLP, MLP4).
  std::vector<std::vector<int>> hidden_sizes;
  std::vector<double> alphas;
  std::vector<double> tols;
  std::vector<Activation> activations;

  /// Settings not on a grid axis (learning rate, epochs, seed, ...).
  ModelConfig base;

  /// Grids holding the published tuned values for `variant`.
  static GridSpec Default(VariantKind variant);
};

struct GridPoint {
  ModelConfig config;
  std::vector<std::pair<std::string, std::string>> params;  // name, printed value
};

/// Cartesian product in a fixed order: for SVR C, epsilon, gamma (gamma
/// fastest); for MLP hidden, activation, alpha, tol (tol fastest).
std::vector<GridPoint> ExpandGrid(const GridSpec& spec);

/// Seeded shuffle of 0..n-1 split into k contiguous folds whose sizes differ
/// by at most one.
std::vector<std::vector<std::size_t>> MakeFolds(std::size_t n, int k, std::uint64_t seed);

struct CvResult {
  std::vector<GridPoint> grid;
  std::vector<std::vector<std::size_t>> folds;
  std::vector<std::vector<double>> fold_scores;  // [config][fold]
  std::vector<double> mean_scores;
  std::size_t best_index = 0;
  double best_score = 0.0;

  const ModelConfig& best_config() const { return grid.at(best_index).config; }
};

/// Score of one fold's raw predictions (n x 1 or n x 4) under `measure`.
double ScoreFold(VariantKind kind, Measure measure, const Matrix& raw, const QeDataset& held_out,
                 DenominatorMode denominator);

/// k-fold grid search. The scaler is refit on each training part; a fold
/// whose measure cannot be computed scores -inf. Training errors propagate
/// with the offending configuration in the message. Ties keep the earliest
/// grid point. Results do not depend on `jobs`.
CvResult GridSearch(const GridSpec& spec, const QeDataset& ds, int jobs = 1);

}  // namespace qe
