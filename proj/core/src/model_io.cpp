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
#include "qe/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qe/errors.hpp"

namespace qe {
namespace {

using nlohmann::json;

json MatrixToJson(const Matrix& m) {
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"values", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto values = j.at("values").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw Error(ErrorCode::kFormatError, "matrix value count does not match its shape");
  }
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

json VectorToJson(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector VectorFromJson(const json& j) {
  const auto values = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(values.size()));
  std::copy(values.begin(), values.end(), v.data());
  return v;
}

json MlpConfigToJson(const MlpConfig& c) {
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

MlpConfig MlpConfigFromJson(const json& j) {
  MlpConfig c;
  c.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  c.activation = ParseActivation(j.at("activation").get<std::string>());
  c.alpha = j.at("alpha").get<double>();
  c.tol = j.at("tol").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.adam_eps = j.at("adam_eps").get<double>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.n_outputs = j.at("n_outputs").get<int>();
  c.shuffle = j.value("shuffle", true);
  return c;
}

json SvrConfigToJson(const SvrConfig& c) {
  return json{{"c", c.c},
              {"epsilon", c.epsilon},
              {"gamma", c.gamma},
              {"tol_kkt", c.tol_kkt},
              {"max_passes", c.max_passes}};
}

SvrConfig SvrConfigFromJson(const json& j) {
  SvrConfig c;
  c.c = j.at("c").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.tol_kkt = j.at("tol_kkt").get<double>();
  c.max_passes = j.at("max_passes").get<long>();
  return c;
}

json MlpToJson(const MlpModel& m) {
  json layers = json::array();
  for (const auto& l : m.layers) {
    layers.push_back(json{{"weights", MatrixToJson(l.weights)}, {"bias", VectorToJson(l.bias)}});
  }
  return json{{"model_kind", "mlp"},
              {"config", MlpConfigToJson(m.config)},
              {"layers", layers},
              {"loss_trace", m.loss_trace}};
}

MlpModel MlpFromJson(const json& j) {
  MlpModel m;
  m.config = MlpConfigFromJson(j.at("config"));
  Eigen::Index prev = -1;
  for (const auto& lj : j.at("layers")) {
    DenseLayer l;
    l.weights = MatrixFromJson(lj.at("weights"));
    l.bias = VectorFromJson(lj.at("bias"));
    if (l.bias.size() != l.weights.cols() || (prev >= 0 && prev != l.weights.rows())) {
      throw Error(ErrorCode::kFormatError, "MLP layer shapes do not chain");
    }
    prev = l.weights.cols();
    m.layers.push_back(std::move(l));
  }
  if (m.layers.empty() || m.layers.size() != m.config.hidden_sizes.size() + 1 ||
      m.output_dim() != m.config.n_outputs) {
    throw Error(ErrorCode::kFormatError, "MLP layers disagree with the stored configuration");
  }
  m.loss_trace = j.value("loss_trace", std::vector<double>{});
  return m;
}

json SvrToJson(const SvrModel& m) {
  return json{{"model_kind", "svr"},
              {"config", SvrConfigToJson(m.config)},
              {"n_features", m.n_features},
              {"support_vectors", MatrixToJson(m.support_vectors)},
              {"dual_coefficients", VectorToJson(m.dual_coefficients)},
              {"bias", m.bias},
              {"stats",
               json{{"iterations", m.stats.iterations},
                    {"kkt_gap", m.stats.kkt_gap},
                    {"dual_objective", m.stats.dual_objective},
                    {"converged", m.stats.converged}}}};
}

SvrModel SvrFromJson(const json& j) {
  SvrModel m;
  m.config = SvrConfigFromJson(j.at("config"));
  m.n_features = j.at("n_features").get<Eigen::Index>();
  m.support_vectors = MatrixFromJson(j.at("support_vectors"));
  m.dual_coefficients = VectorFromJson(j.at("dual_coefficients"));
  m.bias = j.at("bias").get<double>();
  if (m.dual_coefficients.size() != m.support_vectors.rows() ||
      (m.support_vectors.rows() > 0 && m.support_vectors.cols() != m.n_features)) {
    throw Error(ErrorCode::kFormatError, "SVR support vectors and coefficients disagree");
  }
  if (const auto it = j.find("stats"); it != j.end()) {
    m.stats.iterations = it->at("iterations").get<long>();
    m.stats.kkt_gap = it->at("kkt_gap").get<double>();
    m.stats.dual_objective = it->at("dual_objective").get<double>();
    m.stats.converged = it->at("converged").get<bool>();
  }
  return m;
}

}  // namespace

std::string PredictorToJson(const Predictor& p) {
  json models = json::array();
  if (p.mlp) models.push_back(MlpToJson(*p.mlp));
  for (const auto& s : p.svr_models) models.push_back(SvrToJson(s));
  json doc{{"schema_version", kModelSchemaVersion},
           {"format", "qe-predictor"},
           {"kind", std::string(VariantName(p.kind))},
           {"policy", json{{"round", p.policy.round}, {"trim", p.policy.trim}}},
           {"denominator", p.denominator == DenominatorMode::kTargetLength ? "target_length"
                                                                           : "reference_length"},
           {"scaler", json{{"means", VectorToJson(p.scaler.means)},
                           {"stds", VectorToJson(p.scaler.stds)}}},
           {"models", models}};
  return doc.dump(1) + "\n";
}

Predictor PredictorFromJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("model is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw Error(ErrorCode::kFormatError, "unsupported model schema_version " + std::to_string(version));
    }
    Predictor p;
    p.kind = ParseVariant(doc.at("kind").get<std::string>());
    p.policy.round = doc.at("policy").at("round").get<bool>();
    p.policy.trim = doc.at("policy").at("trim").get<bool>();
    const auto denom = doc.at("denominator").get<std::string>();
    if (denom == "target_length") {
      p.denominator = DenominatorMode::kTargetLength;
    } else if (denom == "reference_length") {
      p.denominator = DenominatorMode::kReferenceLength;
    } else {
      throw Error(ErrorCode::kFormatError, "unknown denominator '" + denom + "'");
    }
    p.scaler.means = VectorFromJson(doc.at("scaler").at("means"));
    p.scaler.stds = VectorFromJson(doc.at("scaler").at("stds"));
    if (p.scaler.means.size() != p.scaler.stds.size()) {
      throw Error(ErrorCode::kFormatError, "scaler means and stds differ in length");
    }
    for (const auto& mj : doc.at("models")) {
      const auto tag = mj.at("model_kind").get<std::string>();
      if (tag == "mlp") {
        p.mlp = MlpFromJson(mj);
      } else if (tag == "svr") {
        p.svr_models.push_back(SvrFromJson(mj));
      } else {
        throw Error(ErrorCode::kFormatError, "unknown model_kind '" + tag + "'");
      }
    }
    const bool ok = [&] {
      switch (p.kind) {
        case VariantKind::kSvm: return !p.mlp && p.svr_models.size() == 1;
        case VariantKind::kQuadSvm: return !p.mlp && p.svr_models.size() == kNumEditOps;
        case VariantKind::kMlp: return p.mlp && p.svr_models.empty() && p.mlp->output_dim() == 1;
        case VariantKind::kMlp4: return p.mlp && p.svr_models.empty() && p.mlp->output_dim() == 4;
      }
      return false;
    }();
    if (!ok) throw Error(ErrorCode::kFormatError, "models do not match variant kind");
    if (p.mlp && p.mlp->input_dim() != p.scaler.dim()) {
      throw Error(ErrorCode::kFormatError, "MLP input width differs from scaler width");
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("malformed model document: ") + e.what());
  }
}

void SavePredictor(const Predictor& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << PredictorToJson(p);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

Predictor LoadPredictor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return PredictorFromJson(ss.str());
}

}  // namespace qe
