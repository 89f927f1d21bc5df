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
#include "qe/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "qe/errors.hpp"
#include "qe/parallel.hpp"
#include "qe/ter_align.hpp"

namespace qe {

std::string_view VariantName(VariantKind kind) {
  switch (kind) {
    case VariantKind::kSvm: return "SVM";
    case VariantKind::kQuadSvm: return "QUAD_SVM";
    case VariantKind::kMlp: return "MLP";
    case VariantKind::kMlp4: return "MLP4";
  }
  return "?";
}

VariantKind ParseVariant(std::string_view name) {
  std::string up(name);
  for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "SVM") return VariantKind::kSvm;
  if (up == "QUAD_SVM" || up == "4XSVM" || up == "QUADSVM") return VariantKind::kQuadSvm;
  if (up == "MLP") return VariantKind::kMlp;
  if (up == "MLP4") return VariantKind::kMlp4;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

Predictor TrainVariant(VariantKind kind, const QeDataset& ds, const ModelConfig& cfg, int jobs) {
  ds.Validate();
  if (PredictsEdits(kind) && !ds.has_edits()) {
    throw Error(ErrorCode::kMissingLabels,
                std::string(VariantName(kind)) + " needs edit-count labels (ins del sub shift)");
  }
  if (!PredictsEdits(kind) && !ds.has_hter()) {
    throw Error(ErrorCode::kMissingLabels, std::string(VariantName(kind)) + " needs HTER labels");
  }

  Predictor p;
  p.kind = kind;
  p.scaler = FitScaler(ds.features);
  const FeatureMatrix x = ApplyScaler(p.scaler, ds.features);

  switch (kind) {
    case VariantKind::kSvm:
      p.svr_models.push_back(TrainSvr(cfg.svm, x, ds.gold_hter));
      break;
    case VariantKind::kQuadSvm: {
      const Matrix edits = ds.EditMatrix();
      p.svr_models.resize(kNumEditOps);
      ParallelFor(kNumEditOps, jobs, [&](std::size_t op) {
        const Vector col = edits.col(static_cast<Eigen::Index>(op));
        p.svr_models[op] = TrainSvr(cfg.quad_svm[op], x,
                                    std::span<const double>(col.data(), std::size_t(col.size())));
      });
      break;
    }
    case VariantKind::kMlp: {
      MlpConfig mc = cfg.mlp;
      mc.n_outputs = 1;
      Matrix y(static_cast<Eigen::Index>(ds.size()), 1);
      for (std::size_t i = 0; i < ds.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = ds.gold_hter[i];
      p.mlp = TrainMlp(mc, x, y);
      break;
    }
    case VariantKind::kMlp4: {
      MlpConfig mc = cfg.mlp4;
      mc.n_outputs = 4;
      p.mlp = TrainMlp(mc, x, ds.EditMatrix());
      break;
    }
  }
  return p;
}

Matrix PredictRaw(const Predictor& p, const FeatureMatrix& x) {
  const FeatureMatrix xs = ApplyScaler(p.scaler, x);
  if (p.mlp) return Forward(*p.mlp, xs);
  Matrix out(x.rows(), static_cast<Eigen::Index>(p.svr_models.size()));
  for (std::size_t k = 0; k < p.svr_models.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = PredictSvr(p.svr_models[k], xs);
  }
  return out;
}

Matrix NormalizeEdits(const Matrix& raw, const NormalizationPolicy& policy,
                      std::span<const int> upper_bounds) {
  if (policy.trim && upper_bounds.size() != static_cast<std::size_t>(raw.rows())) {
    throw Error(ErrorCode::kLengthMismatch, "one trim bound per row required");
  }
  Matrix out = raw;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      double v = out(r, c);
      if (policy.round) v = std::round(v);
      if (policy.trim) v = std::clamp(v, 0.0, double(upper_bounds[static_cast<std::size_t>(r)]));
      if ((policy.round || policy.trim) && v == 0.0) v = 0.0;  // drop the sign of -0
      out(r, c) = v;
    }
  }
  return out;
}

std::vector<double> AssembleHterRows(const Matrix& edits, std::span<const int> denominators) {
  if (edits.cols() != Eigen::Index(kNumEditOps)) {
    throw Error(ErrorCode::kDimensionMismatch, "edit matrix must have 4 columns");
  }
  if (denominators.size() != static_cast<std::size_t>(edits.rows())) {
    throw Error(ErrorCode::kLengthMismatch, "one denominator per row required");
  }
  std::vector<double> out(denominators.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = AssembleHter(PredictedEdits{edits(r, 0), edits(r, 1), edits(r, 2), edits(r, 3)},
                          denominators[i]);
  }
  return out;
}

HterPrediction PredictHter(const Predictor& p, const FeatureMatrix& x,
                           std::span<const int> target_lengths,
                           std::optional<std::span<const int>> ref_lengths) {
  return PredictHter(p, x, target_lengths, p.policy, ref_lengths);
}

HterPrediction PredictHter(const Predictor& p, const FeatureMatrix& x,
                           std::span<const int> target_lengths,
                           const NormalizationPolicy& policy,
                           std::optional<std::span<const int>> ref_lengths) {
  if (x.cols() != p.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features have " + std::to_string(x.cols()) + " columns, model expects " +
                    std::to_string(p.input_dim()));
  }
  const auto n = static_cast<std::size_t>(x.rows());
  if (target_lengths.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "got " + std::to_string(target_lengths.size()) + " sentence lengths for " +
                    std::to_string(n) + " feature rows");
  }
  const Matrix raw = PredictRaw(p, x);

  HterPrediction out;
  if (!PredictsEdits(p.kind)) {
    out.hter.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = raw(static_cast<Eigen::Index>(i), 0);
      out.hter[i] = policy.trim ? std::max(0.0, v) : v;
    }
    return out;
  }

  std::span<const int> denominators = target_lengths;
  if (p.denominator == DenominatorMode::kReferenceLength) {
    if (!ref_lengths || ref_lengths->size() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "reference-length denominator needs one reference length per row");
    }
    denominators = *ref_lengths;
  }
  Matrix edits = NormalizeEdits(raw, policy, target_lengths);
  out.hter = AssembleHterRows(edits, denominators);
  out.edits = std::move(edits);
  return out;
}

}  // namespace qe
