// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "hetfx/tree.h"

namespace hetfx {

struct GbmParams {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  TreeParams tree{.max_depth = 3, .min_leaf_rows = 5};
  double row_subsample = 1.0;  // < 1 gives stochastic boosting
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static GbmParams from_json(const nlohmann::json& j, GbmParams defaults);
  static GbmParams from_json(const nlohmann::json& j) { return from_json(j, GbmParams{}); }
};

struct GbmModel {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<TreeModel> trees;
  // Training MSE of the initial constant model followed by one entry per
  // boosting round (n_rounds + 1 values).
  std::vector<double> loss_trace;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  nlohmann::json to_json() const;
  static GbmModel from_json(const nlohmann::json& j);
};

// Stagewise least-squares boosting: F_0 = mean(y); each round fits a CART to
// the current residuals and adds learning_rate * tree.
GbmModel gbm_fit(const Eigen::MatrixXd& X, std::span<const double> y, const GbmParams& params,
                 const TreeFitInputs& inputs = {});

}  // namespace hetfx
