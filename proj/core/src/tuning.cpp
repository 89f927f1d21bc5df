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

#include <cctype>
#include <cstdio>
#include <limits>
#include <numeric>

#include "qe/errors.hpp"
#include "qe/eval.hpp"
#include "qe/parallel.hpp"
#include "qe/random.hpp"

namespace qe {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string FormatHidden(const std::vector<int>& h) {
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(h[i]);
  }
  return s;
}

std::string Describe(const GridPoint& g) {
  std::string s;
  for (const auto& [k, v] : g.params) s += k + "=" + v + " ";
  if (!s.empty()) s.pop_back();
  return s;
}

template <typename T>
void RequireAxis(const std::vector<T>& axis, const char* name) {
  if (axis.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("grid axis '") + name + "' is empty");
  }
}

std::span<const int> Denominators(const QeDataset& ds, DenominatorMode mode) {
  if (mode == DenominatorMode::kReferenceLength) {
    if (!ds.ref_lengths) {
      throw Error(ErrorCode::kMissingLabels, "reference lengths required for the HTER denominator");
    }
    return *ds.ref_lengths;
  }
  if (ds.target_lengths.size() != ds.size()) {
    throw Error(ErrorCode::kMissingLabels, "target sentence lengths required for rho HTER");
  }
  return ds.target_lengths;
}

}  // namespace

std::string_view MeasureName(Measure m) {
  switch (m) {
    case Measure::kR2: return "R2";
    case Measure::kRhoEdits: return "RHO_EDITS";
    case Measure::kRhoHter: return "RHO_HTER";
  }
  return "?";
}

Measure ParseMeasure(std::string_view name) {
  std::string up(name);
  for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "R2") return Measure::kR2;
  if (up == "RHO_EDITS") return Measure::kRhoEdits;
  if (up == "RHO_HTER") return Measure::kRhoHter;
  throw Error(ErrorCode::kInvalidArgument, "unknown measure '" + std::string(name) + "'");
}

GridSpec GridSpec::Default(VariantKind variant) {
  GridSpec g;
  g.variant = variant;
  g.c_values = {1.0, 10.0};
  g.epsilon_values = {0.1, 0.2};
  g.gamma_values = {0.001, 0.01};
  g.hidden_sizes = {{100}, {300}, {300, 150}, {150, 75, 6}};
  g.alphas = {0.01, 0.1};
  g.tols = {1e-3, 1e-9};
  g.activations = {Activation::kRelu, Activation::kTanh};
  return g;
}

std::vector<GridPoint> ExpandGrid(const GridSpec& spec) {
  std::vector<GridPoint> out;
  const bool svr = spec.variant == VariantKind::kSvm || spec.variant == VariantKind::kQuadSvm;
  if (svr) {
    RequireAxis(spec.c_values, "C");
    RequireAxis(spec.epsilon_values, "epsilon");
    RequireAxis(spec.gamma_values, "gamma");
    for (double c : spec.c_values) {
      for (double e : spec.epsilon_values) {
        for (double g : spec.gamma_values) {
          GridPoint p;
          p.config = spec.base;
          SvrConfig s = spec.base.svm;
          s.c = c;
          s.epsilon = e;
          s.gamma = g;
          if (spec.variant == VariantKind::kSvm) {
            p.config.svm = s;
          } else {
            for (std::size_t op = 0; op < kNumEditOps; ++op) {
              SvrConfig q = spec.base.quad_svm[op];
              q.c = c;
              q.epsilon = e;
              q.gamma = g;
              p.config.quad_svm[op] = q;
            }
          }
          p.params = {{"C", FormatDouble(c)}, {"epsilon", FormatDouble(e)}, {"gamma", FormatDouble(g)}};
          out.push_back(std::move(p));
        }
      }
    }
    return out;
  }
  RequireAxis(spec.hidden_sizes, "hidden");
  RequireAxis(spec.activations, "activation");
  RequireAxis(spec.alphas, "alpha");
  RequireAxis(spec.tols, "tol");
  for (const auto& h : spec.hidden_sizes) {
    for (Activation act : spec.activations) {
      for (double a : spec.alphas) {
        for (double t : spec.tols) {
          GridPoint p;
          p.config = spec.base;
          MlpConfig& m = spec.variant == VariantKind::kMlp ? p.config.mlp : p.config.mlp4;
          m.hidden_sizes = h;
          m.activation = act;
          m.alpha = a;
          m.tol = t;
          p.params = {{"hidden", FormatHidden(h)},
                      {"activation", std::string(ActivationName(act))},
                      {"alpha", FormatDouble(a)},
                      {"tol", FormatDouble(t)}};
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> MakeFolds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "fold count must be at least 2");
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(n) + " rows cannot fill " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  Shuffle(std::span<std::size_t>(order), rng);

  const std::size_t kk = static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> folds(kk);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t size = n / kk + (f < n % kk ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<long>(pos), order.begin() + static_cast<long>(pos + size));
    pos += size;
  }
  return folds;
}

double ScoreFold(VariantKind kind, Measure measure, const Matrix& raw, const QeDataset& held_out,
                 DenominatorMode denominator) {
  if (PredictsEdits(kind)) {
    switch (measure) {
      case Measure::kR2:
        return RSquaredColumns(raw, held_out.EditMatrix());
      case Measure::kRhoEdits:
        return RhoEdits(raw, held_out.EditMatrix());
      case Measure::kRhoHter:
        if (!held_out.has_hter()) throw Error(ErrorCode::kMissingLabels, "rho HTER needs gold HTER");
        return RhoHter(raw, held_out.gold_hter, Denominators(held_out, denominator));
    }
  }
  const Vector pred = raw.col(0);
  const std::span<const double> p(pred.data(), static_cast<std::size_t>(pred.size()));
  return measure == Measure::kR2 ? RSquared(p, held_out.gold_hter) : Pearson(p, held_out.gold_hter);
}

CvResult GridSearch(const GridSpec& spec, const QeDataset& ds, int jobs) {
  ds.Validate();
  CvResult result;
  result.grid = ExpandGrid(spec);
  result.folds = MakeFolds(ds.size(), spec.k, spec.seed);
  const std::size_t n_cfg = result.grid.size();
  const std::size_t n_folds = result.folds.size();

  // Training/held-out splits are shared by every configuration.
  std::vector<QeDataset> train_parts(n_folds), held_parts(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < n_folds; ++g) {
      if (g != f) train_idx.insert(train_idx.end(), result.folds[g].begin(), result.folds[g].end());
    }
    train_parts[f] = ds.Subset(train_idx);
    held_parts[f] = ds.Subset(result.folds[f]);
  }

  result.fold_scores.assign(n_cfg, std::vector<double>(n_folds, 0.0));
  ParallelFor(n_cfg * n_folds, jobs, [&](std::size_t item) {
    const std::size_t c = item / n_folds;
    const std::size_t f = item % n_folds;
    const GridPoint& point = result.grid[c];
    Predictor p;
    try {
      p = TrainVariant(spec.variant, train_parts[f], point.config);
    } catch (const Error& e) {
      throw Error(e.code(), "config [" + Describe(point) + "] fold " + std::to_string(f) + ": " +
                                e.message());
    }
    const Matrix raw = PredictRaw(p, held_parts[f].features);
    double score;
    try {
      score = ScoreFold(spec.variant, spec.measure, raw, held_parts[f], spec.denominator);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMissingLabels) throw;
      score = -std::numeric_limits<double>::infinity();
    }
    result.fold_scores[c][f] = score;
  });

  result.mean_scores.resize(n_cfg);
  for (std::size_t c = 0; c < n_cfg; ++c) {
    double sum = 0.0;
    for (double s : result.fold_scores[c]) sum += s;
    result.mean_scores[c] = sum / double(n_folds);
  }
  result.best_index = 0;
  for (std::size_t c = 1; c < n_cfg; ++c) {
    if (result.mean_scores[c] > result.mean_scores[result.best_index]) result.best_index = c;
  }
  result.best_score = result.mean_scores[result.best_index];
  return result;
}

}  // namespace qe
