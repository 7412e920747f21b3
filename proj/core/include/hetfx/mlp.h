// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "hetfx/network.h"

namespace hetfx {

struct MlpParams {
  // Hidden layer widths; empty gives a linear model.
  std::vector<std::size_t> hidden_layers = {64, 64};
  Activation activation = Activation::kRelu;
  double l2_penalty = 1e-4;
  OptimizerParams optimizer;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  // Start every parameter at zero instead of the uniform fan-in rule.
  bool zero_init = false;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static MlpParams from_json(const nlohmann::json& j, MlpParams defaults);
  static MlpParams from_json(const nlohmann::json& j) { return from_json(j, MlpParams{}); }
};

struct MlpModel {
  DenseStack network;
  Eigen::VectorXd params;
  // Full training objective after each epoch.
  std::vector<double> loss_trace;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);
};

// mean squared error over the batch + l2_penalty * sum of squared weights.
// Fills `grad` (same layout as params) when non-null.
double mlp_objective(const DenseStack& network, const Eigen::VectorXd& params,
                     const Eigen::MatrixXd& X, std::span<const double> y, double l2_penalty,
                     Eigen::VectorXd* grad);

// Mini-batch training with per-epoch shuffling from `seed`. TrainingError
// naming the epoch when the loss becomes non-finite.
MlpModel mlp_fit(const Eigen::MatrixXd& X, std::span<const double> y, const MlpParams& params);

}  // namespace hetfx
