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
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qe/types.hpp"

namespace qe {

enum class Activation { kRelu, kTanh };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

struct MlpConfig {
  std::vector<int> hidden_sizes{100};
  Activation activation = Activation::kRelu;
  double alpha = 0.1;  // L2 strength
  double tol = 1e-3;   // epoch-to-epoch loss improvement threshold
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 500;
  int batch_size = 200;  // clipped to the number of rows
  std::uint64_t seed = 42;
  int n_outputs = 4;
  bool shuffle = true;

  /// Throws Error(kInvalidArgument) on a malformed configuration.
  void Validate() const;
};

/// Fully connected layer; weights are fan_in x fan_out.
struct DenseLayer {
  Matrix weights;
  Vector bias;
};

struct MlpModel {
  MlpConfig config;
  std::vector<DenseLayer> layers;  // hidden layers followed by the output layer
  std::vector<double> loss_trace;

  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().weights.rows(); }
  Eigen::Index output_dim() const { return layers.empty() ? 0 : layers.back().weights.cols(); }
  std::size_t parameter_count() const;
};

struct MlpGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Glorot-uniform weights drawn from cfg.seed, zero biases.
MlpModel InitMlp(const MlpConfig& cfg, Eigen::Index input_dim);

/// Hidden layers apply affine + activation; the output layer is affine only.
Matrix Forward(const MlpModel& model, const FeatureMatrix& x);

/// Mean squared error over all n x k outputs plus (alpha / 2n) * sum of
/// squared weights (biases are not penalised), and its gradient.
std::pair<double, MlpGradients> LossAndGradients(const MlpModel& model, const FeatureMatrix& x,
                                                 const Matrix& y);

/// Flattened parameter view: each layer's weights (row-major) then its bias.
std::vector<double> FlattenParameters(const MlpModel& model);
void AssignParameters(MlpModel& model, std::span<const double> flat);
std::vector<double> FlattenGradients(const MlpGradients& grads);

/// Adam with bias-corrected moment estimates over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n_params, double learning_rate, double beta1, double beta2,
                double eps);

  void Step(std::span<double> params, std::span<const double> grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// Mini-batch Adam. Stops when the epoch loss changes by less than cfg.tol
/// on two consecutive epochs, or after cfg.max_epochs. Throws
/// Error(kNonFiniteLoss) on divergence.
MlpModel TrainMlp(const MlpConfig& cfg, const FeatureMatrix& x, const Matrix& y);

}  // namespace qe
