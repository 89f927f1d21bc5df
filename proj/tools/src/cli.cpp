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
#include "qe_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qe/dataset.hpp"
#include "qe/errors.hpp"
#include "qe/eval.hpp"
#include "qe/model_io.hpp"
#include "qe/pipeline.hpp"
#include "qe/ter_align.hpp"
#include "qe/tuning.hpp"

namespace qe::cli {
namespace {

using nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json Number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

// Writes to `path`, or to `fallback` when the path is empty.
void WithOutput(const std::string& path, std::ostream& fallback,
                const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write(f);
  if (!f) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

void WriteJson(const std::string& path, std::ostream& fallback, const json& doc) {
  WithOutput(path, fallback, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
}

void EchoConfig(std::ostream& err, const json& config) {
  err << "# config: " << config.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Model configuration <-> JSON

bool IsMlpKind(VariantKind kind) { return kind == VariantKind::kMlp || kind == VariantKind::kMlp4; }

json SvrJson(const SvrConfig& c) {
  return json{{"c", c.c}, {"epsilon", c.epsilon}, {"gamma", c.gamma},
              {"tol_kkt", c.tol_kkt}, {"max_passes", c.max_passes}};
}

json MlpJson(const MlpConfig& c) {
  return json{{"hidden_sizes", c.hidden_sizes},
              {"activation", std::string(ActivationName(c.activation))},
              {"alpha", c.alpha},
              {"tol", c.tol},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"adam_eps", c.adam_eps},
              {"max_epochs", c.max_epochs},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"n_outputs", c.n_outputs},
              {"shuffle", c.shuffle}};
}

json VariantConfigJson(VariantKind kind, const ModelConfig& cfg) {
  switch (kind) {
    case VariantKind::kSvm: return SvrJson(cfg.svm);
    case VariantKind::kQuadSvm: {
      json models = json::array();
      for (const auto& m : cfg.quad_svm) models.push_back(SvrJson(m));
      return json{{"models", models}};
    }
    case VariantKind::kMlp: return MlpJson(cfg.mlp);
    case VariantKind::kMlp4: return MlpJson(cfg.mlp4);
  }
  return nullptr;
}

void CheckKeys(const json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
  }
}

void ApplySvr(const json& j, SvrConfig& c) {
  CheckKeys(j, {"c", "epsilon", "gamma", "tol_kkt", "max_passes"});
  c.c = j.value("c", c.c);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.gamma = j.value("gamma", c.gamma);
  c.tol_kkt = j.value("tol_kkt", c.tol_kkt);
  c.max_passes = j.value("max_passes", c.max_passes);
}

void ApplyMlp(const json& j, MlpConfig& c) {
  CheckKeys(j, {"hidden_sizes", "activation", "alpha", "tol", "learning_rate", "beta1", "beta2",
                "adam_eps", "max_epochs", "batch_size", "seed", "n_outputs", "shuffle"});
  c.hidden_sizes = j.value("hidden_sizes", c.hidden_sizes);
  if (j.contains("activation")) c.activation = ParseActivation(j.at("activation").get<std::string>());
  c.alpha = j.value("alpha", c.alpha);
  c.tol = j.value("tol", c.tol);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.n_outputs = j.value("n_outputs", c.n_outputs);
  c.shuffle = j.value("shuffle", c.shuffle);
}

// A QUAD_SVM config is either flat (applied to all four models) or
// {"models": [4 objects]} in ins/del/sub/shift order.
void ApplyVariantConfig(VariantKind kind, const json& j, ModelConfig& cfg) {
  switch (kind) {
    case VariantKind::kSvm: ApplySvr(j, cfg.svm); break;
    case VariantKind::kQuadSvm:
      if (j.contains("models")) {
        CheckKeys(j, {"models"});
        const auto& models = j.at("models");
        if (!models.is_array() || models.size() != kNumEditOps) {
          throw Error(ErrorCode::kFormatError, "QUAD_SVM config needs exactly 4 models");
        }
        for (int k = 0; k < kNumEditOps; ++k) ApplySvr(models[static_cast<std::size_t>(k)], cfg.quad_svm[k]);
      } else {
        for (auto& m : cfg.quad_svm) ApplySvr(j, m);
      }
      break;
    case VariantKind::kMlp: ApplyMlp(j, cfg.mlp); break;
    case VariantKind::kMlp4: ApplyMlp(j, cfg.mlp4); break;
  }
}

json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, path + ": " + e.what());
  }
}

std::vector<int> ParseSizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      sizes.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad hidden layer size '" + item + "'");
    }
  }
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "empty hidden layer list");
  return sizes;
}

DenominatorMode ParseDenominator(const std::string& name) {
  if (name == "target") return DenominatorMode::kTargetLength;
  if (name == "reference") return DenominatorMode::kReferenceLength;
  throw Error(ErrorCode::kInvalidArgument, "denominator must be 'target' or 'reference'");
}

std::string DenominatorName(DenominatorMode d) {
  return d == DenominatorMode::kTargetLength ? "target" : "reference";
}

// ---------------------------------------------------------------------------
// Prediction tables: optional header line, whitespace-separated numbers.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }

  std::optional<std::size_t> Find(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    return std::nullopt;
  }
};

Table ReadTable(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::string first;
  std::streampos body = 0;
  Table t;
  while (std::getline(f, first)) {
    std::stringstream ss(first);
    std::vector<std::string> fields;
    for (std::string w; ss >> w;) fields.push_back(w);
    if (fields.empty()) {
      body = f.tellg();
      continue;
    }
    double ignored;
    const bool numeric = std::all_of(fields.begin(), fields.end(), [&](const std::string& w) {
      std::stringstream v(w);
      return (v >> ignored) && v.eof();
    });
    if (!numeric) {
      t.header = fields;
      body = f.tellg();
    }
    break;
  }
  f.clear();
  f.seekg(body);
  const FeatureMatrix m = ParseFeatures(f);
  if (!t.header.empty() && m.rows() > 0 && static_cast<std::size_t>(m.cols()) != t.header.size()) {
    throw Error(ErrorCode::kRaggedRows, path + ": header has " + std::to_string(t.header.size()) +
                                           " fields, rows have " + std::to_string(m.cols()));
  }
  if (t.header.empty()) {
    if (m.cols() == 1) {
      t.header = {"hter"};
    } else if (m.cols() == 1 + kNumEditOps) {
      t.header = {"hter", "ins", "del", "sub", "shift"};
    } else {
      throw Error(ErrorCode::kFormatError,
                  path + ": expected 1 or 5 columns without a header, got " + std::to_string(m.cols()));
    }
  }
  t.columns.resize(t.header.size());
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) t.columns[c].push_back(m(r, static_cast<Eigen::Index>(c)));
  }
  return t;
}

std::vector<double> HterColumn(const Table& t, const std::string& path) {
  const auto c = t.Find("hter");
  if (!c) throw Error(ErrorCode::kFormatError, path + ": no hter column");
  return t.columns[*c];
}

std::optional<Matrix> EditColumns(const Table& t) {
  std::vector<std::size_t> idx;
  for (const char* name : kEditOpNames) {
    const auto c = t.Find(name);
    if (!c) return std::nullopt;
    idx.push_back(*c);
  }
  Matrix m(static_cast<Eigen::Index>(t.rows()), kNumEditOps);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (int k = 0; k < kNumEditOps; ++k) m(static_cast<Eigen::Index>(r), k) = t.columns[idx[k]][r];
  }
  return m;
}

Matrix EditsToMatrix(const std::vector<EditCounts>& e) {
  Matrix m(static_cast<Eigen::Index>(e.size()), kNumEditOps);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto a = e[i].as_array();
    for (int k = 0; k < kNumEditOps; ++k) m(static_cast<Eigen::Index>(i), k) = a[k];
  }
  return m;
}

// ---------------------------------------------------------------------------
// ter

struct TerOptions {
  std::string hyp, ref, out;
  bool case_sensitive = false;
  bool no_shifts = false;
  int max_shift_span = 10;
  int max_shift_distance = 50;
  int jobs = 1;
};

int CmdTer(const TerOptions& o, std::ostream& out, std::ostream& err) {
  TerConfig cfg;
  cfg.enable_shifts = !o.no_shifts;
  cfg.max_shift_span = o.max_shift_span;
  cfg.max_shift_distance = o.max_shift_distance;
  EchoConfig(err, json{{"command", "ter"},
                       {"hyp", o.hyp},
                       {"ref", o.ref},
                       {"case_sensitive", o.case_sensitive},
                       {"shifts", cfg.enable_shifts},
                       {"max_shift_span", cfg.max_shift_span},
                       {"max_shift_distance", cfg.max_shift_distance},
                       {"jobs", o.jobs}});

  const auto hyps = LoadSentences(o.hyp, !o.case_sensitive);
  const auto refs = LoadSentences(o.ref, !o.case_sensitive);
  if (hyps.size() != refs.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "line " + std::to_string(std::min(hyps.size(), refs.size()) + 1) + ": " + o.hyp +
                    " has " + std::to_string(hyps.size()) + " lines, " + o.ref + " has " +
                    std::to_string(refs.size()));
  }
  std::vector<TerResult> scores;
  try {
    scores = ScoreCorpus(hyps, refs, cfg, o.jobs);
  } catch (const Error& e) {
    if (!e.index()) throw;
    throw Error(e.code(), "line " + std::to_string(*e.index() + 1) + ": " + e.message(), e.index());
  }
  WithOutput(o.out, out, [&](std::ostream& os) {
    os << "ins\tdel\tsub\tshift\tref_len\thter\n";
    for (const auto& s : scores) {
      os << s.edits.insertions << '\t' << s.edits.deletions << '\t' << s.edits.substitutions
         << '\t' << s.edits.shifts << '\t' << s.ref_word_count << '\t' << Fixed(s.hter) << '\n';
    }
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct ModelOverrides {
  std::string config;
  std::string hidden;
  std::string activation;
  std::optional<double> alpha, tol, learning_rate, c, epsilon, gamma;
  std::optional<int> max_epochs, batch_size;
};

void AddModelOverrides(CLI::App* cmd, ModelOverrides& m) {
  cmd->add_option("--config", m.config, "JSON file with model settings")->check(CLI::ExistingFile);
  cmd->add_option("--hidden", m.hidden, "Hidden layer sizes, comma separated (MLP kinds)");
  cmd->add_option("--activation", m.activation, "relu or tanh (MLP kinds)");
  cmd->add_option("--alpha", m.alpha, "L2 penalty (MLP kinds)");
  cmd->add_option("--tol", m.tol, "Loss-change stopping tolerance (MLP kinds)");
  cmd->add_option("--learning-rate", m.learning_rate, "Adam step size (MLP kinds)");
  cmd->add_option("--max-epochs", m.max_epochs, "Epoch cap (MLP kinds)");
  cmd->add_option("--batch-size", m.batch_size, "Minibatch size (MLP kinds)");
  cmd->add_option("--c", m.c, "Box constraint (SVR kinds)");
  cmd->add_option("--epsilon", m.epsilon, "Insensitive-tube width (SVR kinds)");
  cmd->add_option("--gamma", m.gamma, "RBF kernel width (SVR kinds)");
}

ModelConfig ResolveModelConfig(VariantKind kind, const ModelOverrides& m, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.mlp.seed = cfg.mlp4.seed = seed;
  if (!m.config.empty()) {
    try {
      ApplyVariantConfig(kind, ReadJsonFile(m.config), cfg);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError, m.config + ": " + e.what());
    }
  }
  if (IsMlpKind(kind)) {
    MlpConfig& c = kind == VariantKind::kMlp ? cfg.mlp : cfg.mlp4;
    if (!m.hidden.empty()) c.hidden_sizes = ParseSizes(m.hidden);
    if (!m.activation.empty()) c.activation = ParseActivation(m.activation);
    if (m.alpha) c.alpha = *m.alpha;
    if (m.tol) c.tol = *m.tol;
    if (m.learning_rate) c.learning_rate = *m.learning_rate;
    if (m.max_epochs) c.max_epochs = *m.max_epochs;
    if (m.batch_size) c.batch_size = *m.batch_size;
  } else {
    auto apply = [&](SvrConfig& c) {
      if (m.c) c.c = *m.c;
      if (m.epsilon) c.epsilon = *m.epsilon;
      if (m.gamma) c.gamma = *m.gamma;
    };
    if (kind == VariantKind::kSvm) {
      apply(cfg.svm);
    } else {
      for (auto& c : cfg.quad_svm) apply(c);
    }
  }
  return cfg;
}

// Features plus labels whose column count must suit `kind`.
QeDataset LoadTrainingData(VariantKind kind, const std::string& features, const std::string& labels) {
  QeDataset ds;
  ds.features = LoadFeatures(features);
  const int cols = CountLabelColumns(labels);
  const int want = PredictsEdits(kind) ? kNumEditOps : 1;
  if (cols != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(VariantName(kind)) + " needs " + std::to_string(want) +
                    "-column labels, " + labels + " has " + std::to_string(cols));
  }
  if (PredictsEdits(kind)) {
    ds.gold_edits = LoadEditLabels(labels);
  } else {
    ds.gold_hter = LoadHterLabels(labels);
  }
  ds.Validate();
  return ds;
}

struct TrainOptions {
  std::string features, labels, variant, out, denominator = "target";
  ModelOverrides model;
  std::uint64_t seed = 42;
  int jobs = 1;
};

int CmdTrain(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  const VariantKind kind = ParseVariant(o.variant);
  const ModelConfig cfg = ResolveModelConfig(kind, o.model, o.seed);
  const DenominatorMode denom = ParseDenominator(o.denominator);
  EchoConfig(err, json{{"command", "train"},
                       {"features", o.features},
                       {"labels", o.labels},
                       {"variant", std::string(VariantName(kind))},
                       {"denominator", DenominatorName(denom)},
                       {"model", VariantConfigJson(kind, cfg)},
                       {"seed", o.seed},
                       {"jobs", o.jobs},
                       {"out", o.out}});

  const QeDataset ds = LoadTrainingData(kind, o.features, o.labels);
  Predictor p = TrainVariant(kind, ds, cfg, o.jobs);
  p.denominator = denom;
  SavePredictor(p, o.out);

  out << "variant\t" << VariantName(kind) << "\n";
  out << "rows\t" << ds.size() << "\n";
  out << "features\t" << ds.features.cols() << "\n";
  if (p.mlp) {
    out << "parameters\t" << p.mlp->parameter_count() << "\n";
    out << "epochs\t" << p.mlp->loss_trace.size() << "\n";
    if (!p.mlp->loss_trace.empty()) out << "final_loss\t" << Fixed(p.mlp->loss_trace.back()) << "\n";
  }
  for (std::size_t k = 0; k < p.svr_models.size(); ++k) {
    const std::string tag = p.svr_models.size() == 1 ? "" : std::string("_") + kEditOpNames[k];
    const auto& m = p.svr_models[k];
    out << "support_vectors" << tag << "\t" << m.support_vectors.rows() << "\n";
    out << "converged" << tag << "\t" << (m.stats.converged ? "true" : "false") << "\n";
  }
  out << "model\t" << o.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict

struct PredictOptions {
  std::string model, features, sentences, ref_sentences, out;
  bool round = false;
  bool trim = false;
};

int CmdPredict(const PredictOptions& o, std::ostream& out, std::ostream& err) {
  const NormalizationPolicy policy{o.round, o.trim};
  const Predictor p = LoadPredictor(o.model);
  EchoConfig(err, json{{"command", "predict"},
                       {"model", o.model},
                       {"variant", std::string(VariantName(p.kind))},
                       {"features", o.features},
                       {"sentences", o.sentences},
                       {"ref_sentences", o.ref_sentences},
                       {"denominator", DenominatorName(p.denominator)},
                       {"round", policy.round},
                       {"trim", policy.trim}});

  const FeatureMatrix x = LoadFeatures(o.features);
  std::vector<int> lengths;
  if (!o.sentences.empty()) {
    lengths = SentenceLengths(o.sentences);
  } else if (PredictsEdits(p.kind)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(VariantName(p.kind)) + " needs --sentences for target lengths");
  } else {
    lengths.assign(static_cast<std::size_t>(x.rows()), 0);
  }
  std::optional<std::vector<int>> refs;
  if (!o.ref_sentences.empty()) refs = SentenceLengths(o.ref_sentences);
  std::optional<std::span<const int>> ref_span;
  if (refs) ref_span = std::span<const int>(*refs);

  const HterPrediction pred = PredictHter(p, x, lengths, policy, ref_span);
  WithOutput(o.out, out, [&](std::ostream& os) {
    os << (pred.edits ? "hter\tins\tdel\tsub\tshift\n" : "hter\n");
    for (std::size_t i = 0; i < pred.hter.size(); ++i) {
      os << Fixed(pred.hter[i]);
      if (pred.edits) {
        for (int k = 0; k < kNumEditOps; ++k) {
          os << '\t' << Fixed((*pred.edits)(static_cast<Eigen::Index>(i), k));
        }
      }
      os << '\n';
    }
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string pred, gold, gold_edits, sentences, ref_sentences, json_out;
  std::string denominator = "target";
};

int CmdEvaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const DenominatorMode denom = ParseDenominator(o.denominator);
  const json config{{"command", "evaluate"},
                    {"pred", o.pred},
                    {"gold", o.gold},
                    {"gold_edits", o.gold_edits},
                    {"sentences", o.sentences},
                    {"ref_sentences", o.ref_sentences},
                    {"denominator", DenominatorName(denom)}};
  EchoConfig(err, config);

  const Table pred = ReadTable(o.pred);
  const Table gold = ReadTable(o.gold);
  const auto pred_hter = HterColumn(pred, o.pred);
  const auto gold_hter = HterColumn(gold, o.gold);
  const auto pred_edits = EditColumns(pred);
  std::optional<Matrix> gold_edits;
  if (!o.gold_edits.empty()) gold_edits = EditsToMatrix(LoadEditLabels(o.gold_edits));
  std::vector<int> denominators;
  const std::string& len_file = denom == DenominatorMode::kTargetLength ? o.sentences : o.ref_sentences;
  if (!len_file.empty()) denominators = SentenceLengths(len_file);

  EvalInputs in;
  in.pred_hter = pred_hter;
  in.gold_hter = gold_hter;
  if (pred_edits) in.pred_edits = &*pred_edits;
  if (gold_edits) in.gold_edits = &*gold_edits;
  in.denominators = denominators;
  const EvalReport r = Evaluate(in);

  out << "measure\tvalue\n";
  out << "n\t" << r.n << "\n";
  auto row = [&](const char* name, std::optional<double> v) {
    out << name << '\t' << (v ? Fixed(*v) : std::string("NA")) << '\n';
  };
  row("rho", r.rho);
  row("r2", r.r2);
  row("rho_edits", r.rho_edits);
  row("rho_hter", r.rho_hter);
  if (!o.json_out.empty()) {
    WriteJson(o.json_out, out, json{{"schema_version", kReportSchemaVersion},
                                    {"config", config},
                                    {"n", r.n},
                                    {"rho", Number(r.rho)},
                                    {"r2", Number(r.r2)},
                                    {"rho_edits", Number(r.rho_edits)},
                                    {"rho_hter", Number(r.rho_hter)}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// significance

struct SignificanceOptions {
  std::string pred_a, pred_b, gold, json_out;
  int samples = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  int jobs = 1;
};

int CmdSignificance(const SignificanceOptions& o, std::ostream& out, std::ostream& err) {
  const json config{{"command", "significance"}, {"pred_a", o.pred_a}, {"pred_b", o.pred_b},
                    {"gold", o.gold},            {"samples", o.samples}, {"alpha", o.alpha},
                    {"seed", o.seed},            {"jobs", o.jobs}};
  EchoConfig(err, config);

  const auto a = HterColumn(ReadTable(o.pred_a), o.pred_a);
  const auto b = HterColumn(ReadTable(o.pred_b), o.pred_b);
  const auto gold = HterColumn(ReadTable(o.gold), o.gold);
  const SignificanceResult s = BootstrapSignificance(a, b, gold, o.samples, o.alpha, o.seed, o.jobs);
  const double rho_a = Pearson(a, gold);
  const double rho_b = Pearson(b, gold);

  out << "measure\tvalue\n";
  out << "rho_a\t" << Fixed(rho_a) << "\n";
  out << "rho_b\t" << Fixed(rho_b) << "\n";
  out << "win_fraction\t" << Fixed(s.win_fraction) << "\n";
  out << "n_samples\t" << s.n_samples << "\n";
  out << "alpha\t" << Fixed(s.alpha) << "\n";
  out << "significant\t" << (s.significant ? "true" : "false") << "\n";
  if (!o.json_out.empty()) {
    WriteJson(o.json_out, out,
              json{{"schema_version", kReportSchemaVersion},
                   {"config", config},
                   {"rho_a", rho_a},
                   {"rho_b", rho_b},
                   {"significance", json{{"win_fraction", s.win_fraction},
                                         {"n_samples", s.n_samples},
                                         {"alpha", s.alpha},
                                         {"significant", s.significant}}}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tune

struct TuneOptions {
  std::string features, labels, variant, measure = "RHO_EDITS", grid, gold_hter, sentences,
      ref_sentences, out, json_out, denominator = "target";
  int folds = 5;
  std::uint64_t seed = 42;
  int jobs = 1;
  std::optional<int> max_epochs;
};

template <typename T>
void ReadAxis(const json& j, const char* key, std::vector<T>& axis) {
  if (j.contains(key)) axis = j.at(key).get<std::vector<T>>();
}

GridSpec ResolveGrid(const TuneOptions& o, VariantKind kind) {
  GridSpec spec = GridSpec::Default(kind);
  spec.measure = ParseMeasure(o.measure);
  spec.k = o.folds;
  spec.seed = o.seed;
  spec.denominator = ParseDenominator(o.denominator);
  spec.base.mlp.seed = spec.base.mlp4.seed = o.seed;
  if (!o.grid.empty()) {
    const json j = ReadJsonFile(o.grid);
    try {
      CheckKeys(j, {"c", "epsilon", "gamma", "hidden_sizes", "alpha", "tol", "activation", "base"});
      ReadAxis(j, "c", spec.c_values);
      ReadAxis(j, "epsilon", spec.epsilon_values);
      ReadAxis(j, "gamma", spec.gamma_values);
      ReadAxis(j, "hidden_sizes", spec.hidden_sizes);
      ReadAxis(j, "alpha", spec.alphas);
      ReadAxis(j, "tol", spec.tols);
      if (j.contains("activation")) {
        spec.activations.clear();
        for (const auto& a : j.at("activation")) spec.activations.push_back(ParseActivation(a.get<std::string>()));
      }
      if (j.contains("base")) ApplyVariantConfig(kind, j.at("base"), spec.base);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError, o.grid + ": " + e.what());
    }
  }
  if (o.max_epochs) spec.base.mlp.max_epochs = spec.base.mlp4.max_epochs = *o.max_epochs;
  return spec;
}

json GridJson(const GridSpec& s) {
  json j{{"variant", std::string(VariantName(s.variant))},
         {"measure", std::string(MeasureName(s.measure))},
         {"folds", s.k},
         {"seed", s.seed},
         {"denominator", DenominatorName(s.denominator)},
         {"base", VariantConfigJson(s.variant, s.base)}};
  if (IsMlpKind(s.variant)) {
    j["hidden_sizes"] = s.hidden_sizes;
    j["alpha"] = s.alphas;
    j["tol"] = s.tols;
    json acts = json::array();
    for (auto a : s.activations) acts.push_back(std::string(ActivationName(a)));
    j["activation"] = acts;
  } else {
    j["c"] = s.c_values;
    j["epsilon"] = s.epsilon_values;
    j["gamma"] = s.gamma_values;
  }
  return j;
}

int CmdTune(const TuneOptions& o, std::ostream& out, std::ostream& err) {
  const VariantKind kind = ParseVariant(o.variant);
  const GridSpec spec = ResolveGrid(o, kind);
  const json config{{"command", "tune"}, {"features", o.features}, {"labels", o.labels},
                    {"gold_hter", o.gold_hter}, {"sentences", o.sentences},
                    {"ref_sentences", o.ref_sentences}, {"grid", GridJson(spec)}, {"jobs", o.jobs}};
  EchoConfig(err, config);

  QeDataset ds = LoadTrainingData(kind, o.features, o.labels);
  if (!o.sentences.empty()) ds.target_lengths = SentenceLengths(o.sentences);
  if (!o.ref_sentences.empty()) ds.ref_lengths = SentenceLengths(o.ref_sentences);
  if (!o.gold_hter.empty()) ds.gold_hter = LoadHterLabels(o.gold_hter);
  const CvResult cv = GridSearch(spec, ds, o.jobs);

  std::vector<std::string> names;
  if (!cv.grid.empty()) {
    for (const auto& [name, value] : cv.grid.front().params) names.push_back(name);
  }
  auto score = [](double v) { return std::isfinite(v) ? Fixed(v) : std::string("-inf"); };
  WithOutput(o.out, out, [&](std::ostream& os) {
    os << "config";
    for (const auto& n : names) os << '\t' << n;
    for (std::size_t f = 0; f < cv.folds.size(); ++f) os << "\tfold" << f + 1;
    os << "\tmean\tbest\n";
    for (std::size_t c = 0; c < cv.grid.size(); ++c) {
      os << c;
      for (const auto& [name, value] : cv.grid[c].params) os << '\t' << value;
      for (double s : cv.fold_scores[c]) os << '\t' << score(s);
      os << '\t' << score(cv.mean_scores[c]) << '\t' << (c == cv.best_index ? "*" : "") << '\n';
    }
  });
  if (!o.out.empty()) {
    out << "best_config\t" << cv.best_index << "\n";
    out << "best_score\t" << score(cv.best_score) << "\n";
  }
  if (!o.json_out.empty()) {
    json rows = json::array();
    for (std::size_t c = 0; c < cv.grid.size(); ++c) {
      json params = json::object();
      for (const auto& [name, value] : cv.grid[c].params) params[name] = value;
      json folds = json::array();
      for (double s : cv.fold_scores[c]) folds.push_back(Number(s));
      rows.push_back(json{{"params", params},
                          {"fold_scores", folds},
                          {"mean", Number(cv.mean_scores[c])},
                          {"model", VariantConfigJson(kind, cv.grid[c].config)}});
    }
    WriteJson(o.json_out, out, json{{"schema_version", kReportSchemaVersion},
                                    {"config", config},
                                    {"measure", std::string(MeasureName(spec.measure))},
                                    {"grid", rows},
                                    {"best_index", cv.best_index},
                                    {"best_score", Number(cv.best_score)}});
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quality estimation of machine translation by predicting HTER edit operations",
               "qe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qe 0.1.0");

  TerOptions ter;
  auto* ter_cmd = app.add_subcommand("ter", "Compute TER edit counts and HTER for sentence pairs");
  ter_cmd->add_option("--hyp", ter.hyp, "Hypothesis (MT output) file, one sentence per line")
      ->required()->check(CLI::ExistingFile);
  ter_cmd->add_option("--ref", ter.ref, "Reference (post-edit) file, one sentence per line")
      ->required()->check(CLI::ExistingFile);
  ter_cmd->add_option("--out", ter.out, "Output TSV (default stdout)");
  ter_cmd->add_flag("--case-sensitive", ter.case_sensitive, "Compare tokens without lowercasing");
  ter_cmd->add_flag("--no-shifts", ter.no_shifts, "Disable block shifts");
  ter_cmd->add_option("--max-shift-span", ter.max_shift_span, "Longest span a shift may move")
      ->capture_default_str();
  ter_cmd->add_option("--max-shift-distance", ter.max_shift_distance, "Largest shift displacement")
      ->capture_default_str();
  ter_cmd->add_option("--jobs", ter.jobs, "Worker threads")->capture_default_str();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a predictor and save it as JSON");
  train_cmd->add_option("--features", train.features, "Feature matrix, one row per sentence")
      ->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--labels", train.labels, "HTER (1 column) or ins/del/sub/shift (4 columns)")
      ->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--variant", train.variant, "SVM, QUAD_SVM, MLP or MLP4")->required();
  train_cmd->add_option("--out", train.out, "Model file to write")->required();
  train_cmd->add_option("--denominator", train.denominator, "HTER denominator: target or reference")
      ->capture_default_str();
  AddModelOverrides(train_cmd, train.model);
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--jobs", train.jobs, "Worker threads")->capture_default_str();

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict HTER with a saved model");
  predict_cmd->add_option("--model", predict.model, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--features", predict.features, "Feature matrix")
      ->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--sentences", predict.sentences, "Target sentences (lengths bound edits)")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--ref-sentences", predict.ref_sentences,
                          "Reference sentences, for reference-length denominators")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict.out, "Output TSV (default stdout)");
  predict_cmd->add_flag("--round", predict.round, "Round predicted edit counts");
  predict_cmd->add_flag("--trim", predict.trim, "Clamp edit counts to [0, sentence length]");

  EvaluateOptions evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold labels");
  eval_cmd->add_option("--pred", evaluate.pred, "Prediction TSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", evaluate.gold, "Gold HTER")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold-edits", evaluate.gold_edits, "Gold ins/del/sub/shift counts")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--sentences", evaluate.sentences, "Target sentences, for rho_hter")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--ref-sentences", evaluate.ref_sentences, "Reference sentences, for rho_hter")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--denominator", evaluate.denominator, "target or reference")
      ->capture_default_str();
  eval_cmd->add_option("--json", evaluate.json_out, "Write a JSON report");

  SignificanceOptions sig;
  auto* sig_cmd = app.add_subcommand("significance", "Paired bootstrap test of system A over B");
  sig_cmd->add_option("--pred-a", sig.pred_a, "Predictions of system A")
      ->required()->check(CLI::ExistingFile);
  sig_cmd->add_option("--pred-b", sig.pred_b, "Predictions of system B")
      ->required()->check(CLI::ExistingFile);
  sig_cmd->add_option("--gold", sig.gold, "Gold HTER")->required()->check(CLI::ExistingFile);
  sig_cmd->add_option("--samples", sig.samples, "Bootstrap samples")->capture_default_str();
  sig_cmd->add_option("--alpha", sig.alpha, "Significance level")->capture_default_str();
  sig_cmd->add_option("--seed", sig.seed, "Random seed")->capture_default_str();
  sig_cmd->add_option("--jobs", sig.jobs, "Worker threads")->capture_default_str();
  sig_cmd->add_option("--json", sig.json_out, "Write a JSON report");

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "K-fold grid search over model settings");
  tune_cmd->add_option("--features", tune.features, "Feature matrix")->required()->check(CLI::ExistingFile);
  tune_cmd->add_option("--labels", tune.labels, "HTER (1 column) or edit counts (4 columns)")
      ->required()->check(CLI::ExistingFile);
  tune_cmd->add_option("--variant", tune.variant, "SVM, QUAD_SVM, MLP or MLP4")->required();
  tune_cmd->add_option("--measure", tune.measure, "R2, RHO_EDITS or RHO_HTER")->capture_default_str();
  tune_cmd->add_option("--grid", tune.grid, "JSON file overriding grid axes")->check(CLI::ExistingFile);
  tune_cmd->add_option("--gold-hter", tune.gold_hter, "Gold HTER, for RHO_HTER with edit labels")
      ->check(CLI::ExistingFile);
  tune_cmd->add_option("--sentences", tune.sentences, "Target sentences")->check(CLI::ExistingFile);
  tune_cmd->add_option("--ref-sentences", tune.ref_sentences, "Reference sentences")
      ->check(CLI::ExistingFile);
  tune_cmd->add_option("--denominator", tune.denominator, "target or reference")->capture_default_str();
  tune_cmd->add_option("--folds", tune.folds, "Number of folds")->capture_default_str();
  tune_cmd->add_option("--max-epochs", tune.max_epochs, "Epoch cap for MLP kinds");
  tune_cmd->add_option("--seed", tune.seed, "Random seed")->capture_default_str();
  tune_cmd->add_option("--jobs", tune.jobs, "Worker threads")->capture_default_str();
  tune_cmd->add_option("--out", tune.out, "Output TSV (default stdout)");
  tune_cmd->add_option("--json", tune.json_out, "Write a JSON report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ter_cmd->parsed()) return CmdTer(ter, out, err);
    if (train_cmd->parsed()) return CmdTrain(train, out, err);
    if (predict_cmd->parsed()) return CmdPredict(predict, out, err);
    if (eval_cmd->parsed()) return CmdEvaluate(evaluate, out, err);
    if (sig_cmd->parsed()) return CmdSignificance(sig, out, err);
    if (tune_cmd->parsed()) return CmdTune(tune, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_numerical() ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace qe::cli
