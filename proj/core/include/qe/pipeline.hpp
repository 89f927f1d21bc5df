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

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qe/dataset.hpp"
#include "qe/neural.hpp"
#include "qe/svr.hpp"
#include "qe/types.hpp"

namespace qe {

/// SVM and MLP regress HTER directly; QUAD_SVM (one SVR per operation) and
/// MLP4 (one network, four outputs) predict the edit counts.
enum class VariantKind { kSvm, kQuadSvm, kMlp, kMlp4 };

std::string_view VariantName(VariantKind kind);
VariantKind ParseVariant(std::string_view name);
inline bool PredictsEdits(VariantKind kind) {
  return kind == VariantKind::kQuadSvm || kind == VariantKind::kMlp4;
}

struct NormalizationPolicy {
  bool round = false;
  bool trim = false;
  friend bool operator==(const NormalizationPolicy&, const NormalizationPolicy&) = default;
};

/// Which length divides the predicted edit total.
enum class DenominatorMode { kTargetLength, kReferenceLength };

/// Hyperparameters for every variant; only the part matching the trained
/// kind is used. Defaults are the tuned German-English settings.
struct ModelConfig {
  SvrConfig svm{.c = 10.0, .epsilon = 0.1, .gamma = 0.001};
  std::array<SvrConfig, kNumEditOps> quad_svm{
      SvrConfig{.c = 10.0, .epsilon = 0.2, .gamma = 0.01},   // ins
      SvrConfig{.c = 10.0, .epsilon = 0.2, .gamma = 0.01},   // del
      SvrConfig{.c = 10.0, .epsilon = 0.1, .gamma = 0.01},   // sub
      SvrConfig{.c = 10.0, .epsilon = 0.2, .gamma = 0.01}};  // shift
  MlpConfig mlp{.hidden_sizes = {100}, .activation = Activation::kRelu, .alpha = 0.1,
                .tol = 1e-9, .n_outputs = 1};
  MlpConfig mlp4{.hidden_sizes = {300}, .activation = Activation::kRelu, .alpha = 0.1,
                 .tol = 1e-3, .n_outputs = 4};
};

struct Predictor {
  VariantKind kind = VariantKind::kMlp4;
  Scaler scaler;
  std::vector<SvrModel> svr_models;  // 1 for SVM, 4 (ins, del, sub, shift) for QUAD_SVM
  std::optional<MlpModel> mlp;       // MLP and MLP4
  NormalizationPolicy policy;
  DenominatorMode denominator = DenominatorMode::kTargetLength;

  Eigen::Index input_dim() const { return scaler.dim(); }
};

/// Fits the scaler on `ds`, then trains the variant on scaled features.
/// Throws Error(kMissingLabels) when the needed labels are absent.
Predictor TrainVariant(VariantKind kind, const QeDataset& ds, const ModelConfig& cfg,
                       int jobs = 1);

/// Raw model output on unscaled features: n x 1 (HTER) or n x 4 (edits).
Matrix PredictRaw(const Predictor& p, const FeatureMatrix& x);

/// Rounds half away from zero, then clamps each row to [0, upper_bound].
Matrix NormalizeEdits(const Matrix& raw, const NormalizationPolicy& policy,
                      std::span<const int> upper_bounds);

/// Per-row HTER from edit counts and denominators.
std::vector<double> AssembleHterRows(const Matrix& edits, std::span<const int> denominators);

struct HterPrediction {
  std::vector<double> hter;
  std::optional<Matrix> edits;  // normalised edits, 4-output kinds only
};

/// Predicted HTER. Edit-count kinds are normalised by `policy` with the
/// target length as trim bound; the denominator is the target length, or
/// `ref_lengths` when p.denominator is kReferenceLength. Direct kinds return
/// the model output, floored at 0 when trimming.
HterPrediction PredictHter(const Predictor& p, const FeatureMatrix& x,
                           std::span<const int> target_lengths,
                           std::optional<std::span<const int>> ref_lengths = std::nullopt);
HterPrediction PredictHter(const Predictor& p, const FeatureMatrix& x,
                           std::span<const int> target_lengths,
                           const NormalizationPolicy& policy,
                           std::optional<std::span<const int>> ref_lengths = std::nullopt);

}  // namespace qe
