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
#include "qe/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qe/errors.hpp"
#include "qe/random.hpp"

namespace qe {
namespace {

void Activate(Activation a, Matrix& z) {
  if (a == Activation::kRelu) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.array().tanh().matrix();
  }
}

// Multiplies upstream gradient by the activation derivative, expressed
// through the activated output.
void BackpropActivation(Activation a, const Matrix& activated, Matrix& delta) {
  if (a == Activation::kRelu) {
    delta = (activated.array() > 0.0).select(delta, 0.0);
  } else {
    delta = delta.array() * (1.0 - activated.array().square());
  }
}

void CheckInput(const MlpModel& model, const FeatureMatrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(model.input_dim()));
  }
}

// Returns the post-activation output of every layer (last one is the
// prediction).
std::vector<Matrix> ForwardAll(const MlpModel& model, const FeatureMatrix& x) {
  std::vector<Matrix> acts;
  acts.reserve(model.layers.size());
  const Matrix* in = &x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    Matrix z = (*in) * layer.weights;
    z.rowwise() += layer.bias.transpose();
    if (l + 1 < model.layers.size()) Activate(model.config.activation, z);
    acts.push_back(std::move(z));
    in = &acts.back();
  }
  return acts;
}

}  // namespace

std::string_view ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error(ErrorCode::kInvalidArgument, "unknown activation '" + std::string(name) + "'");
}

void MlpConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (hidden_sizes.empty()) fail("hidden_sizes must not be empty");
  for (int h : hidden_sizes) {
    if (h <= 0) fail("hidden layer sizes must be positive");
  }
  if (n_outputs != 1 && n_outputs != 4) fail("n_outputs must be 1 or 4");
  if (!(alpha >= 0.0)) fail("alpha must be non-negative");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    fail("beta1 and beta2 must lie in (0, 1)");
  }
  if (!(adam_eps > 0.0)) fail("adam_eps must be positive");
  if (max_epochs <= 0) fail("max_epochs must be positive");
  if (batch_size <= 0) fail("batch_size must be positive");
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

MlpModel InitMlp(const MlpConfig& cfg, Eigen::Index input_dim) {
  cfg.Validate();
  if (input_dim < 1) throw Error(ErrorCode::kInvalidArgument, "input_dim must be positive");
  MlpModel model;
  model.config = cfg;
  Rng rng(cfg.seed);
  Eigen::Index fan_in = input_dim;
  std::vector<Eigen::Index> sizes(cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(cfg.n_outputs);
  for (Eigen::Index fan_out : sizes) {
    DenseLayer layer;
    const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
    layer.weights.resize(fan_in, fan_out);
    for (Eigen::Index r = 0; r < fan_in; ++r) {
      for (Eigen::Index c = 0; c < fan_out; ++c) {
        layer.weights(r, c) = (2.0 * UniformUnit(rng) - 1.0) * limit;
      }
    }
    layer.bias = Vector::Zero(fan_out);
    model.layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return model;
}

Matrix Forward(const MlpModel& model, const FeatureMatrix& x) {
  CheckInput(model, x);
  return std::move(ForwardAll(model, x).back());
}

std::pair<double, MlpGradients> LossAndGradients(const MlpModel& model, const FeatureMatrix& x,
                                                 const Matrix& y) {
  CheckInput(model, x);
  if (y.rows() != x.rows() || y.cols() != model.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "targets are " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                    ", expected " + std::to_string(x.rows()) + "x" +
                    std::to_string(model.output_dim()));
  }
  const double n = double(x.rows());
  const double k = double(y.cols());
  const double alpha = model.config.alpha;

  const auto acts = ForwardAll(model, x);
  const Matrix residual = acts.back() - y;
  double penalty = 0.0;
  for (const auto& l : model.layers) penalty += l.weights.squaredNorm();
  const double loss = residual.squaredNorm() / (n * k) + alpha / (2.0 * n) * penalty;

  const std::size_t depth = model.layers.size();
  MlpGradients g;
  g.weights.resize(depth);
  g.biases.resize(depth);
  Matrix delta = residual * (2.0 / (n * k));
  for (std::size_t l = depth; l-- > 0;) {
    const Matrix& input = l == 0 ? static_cast<const Matrix&>(x) : acts[l - 1];
    g.weights[l] = input.transpose() * delta + (alpha / n) * model.layers[l].weights;
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix upstream = delta * model.layers[l].weights.transpose();
      BackpropActivation(model.config.activation, acts[l - 1], upstream);
      delta = std::move(upstream);
    }
  }
  return {loss, std::move(g)};
}

std::vector<double> FlattenParameters(const MlpModel& model) {
  std::vector<double> flat;
  flat.reserve(model.parameter_count());
  for (const auto& l : model.layers) {
    flat.insert(flat.end(), l.weights.data(), l.weights.data() + l.weights.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void AssignParameters(MlpModel& model, std::span<const double> flat) {
  if (flat.size() != model.parameter_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector has wrong length");
  }
  std::size_t off = 0;
  for (auto& l : model.layers) {
    std::copy_n(flat.data() + off, l.weights.size(), l.weights.data());
    off += static_cast<std::size_t>(l.weights.size());
    std::copy_n(flat.data() + off, l.bias.size(), l.bias.data());
    off += static_cast<std::size_t>(l.bias.size());
  }
}

std::vector<double> FlattenGradients(const MlpGradients& grads) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    // Same row-major order as FlattenParameters.
    const Matrix& w = grads.weights[l];
    flat.insert(flat.end(), w.data(), w.data() + w.size());
    flat.insert(flat.end(), grads.biases[l].data(), grads.biases[l].data() + grads.biases[l].size());
  }
  return flat;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, double learning_rate, double beta1,
                             double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n_params, 0.0),
      v_(n_params, 0.0) {}

void AdamOptimizer::Step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "adam: parameter/gradient size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

MlpModel TrainMlp(const MlpConfig& cfg, const FeatureMatrix& x, const Matrix& y) {
  cfg.Validate();
  if (x.rows() == 0) throw Error(ErrorCode::kTooFewRows, "no training rows");
  if (y.rows() != x.rows() || y.cols() != cfg.n_outputs) {
    throw Error(ErrorCode::kDimensionMismatch,
                "targets are " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) +
                    ", expected " + std::to_string(x.rows()) + "x" +
                    std::to_string(cfg.n_outputs));
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "training data contain NaN/inf");
  }

  MlpModel model = InitMlp(cfg, x.cols());
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);

  std::vector<double> params = FlattenParameters(model);
  AdamOptimizer adam(params.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps);
  Rng rng(DeriveSeed(cfg.seed, 1));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  FeatureMatrix xb;
  Matrix yb;
  int quiet_epochs = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.shuffle) Shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), x.cols());
      yb.resize(static_cast<Eigen::Index>(len), y.cols());
      for (std::size_t k = 0; k < len; ++k) {
        const auto src = static_cast<Eigen::Index>(order[start + k]);
        xb.row(static_cast<Eigen::Index>(k)) = x.row(src);
        yb.row(static_cast<Eigen::Index>(k)) = y.row(src);
      }
      auto [loss, grads] = LossAndGradients(model, xb, yb);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "training diverged at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * double(len);
      const auto flat = FlattenGradients(grads);
      adam.Step(params, flat);
      AssignParameters(model, params);
    }
    epoch_loss /= double(n);
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "training diverged at epoch " + std::to_string(epoch + 1));
    }
    if (!model.loss_trace.empty() && std::abs(model.loss_trace.back() - epoch_loss) < cfg.tol) {
      ++quiet_epochs;
    } else {
      quiet_epochs = 0;
    }
    model.loss_trace.push_back(epoch_loss);
    if (quiet_epochs >= 2) break;
  }
  for (const auto& p : params) {
    if (!std::isfinite(p)) throw Error(ErrorCode::kNonFiniteLoss, "non-finite parameters");
  }
  return model;
}

}  // namespace qe
