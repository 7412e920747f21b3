// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "hetfx/tree.h"

namespace hetfx {

struct ForestParams {
  std::size_t n_trees = 100;
  double feature_subsample = 1.0 / 3.0;
  double row_subsample = 1.0;
  bool bootstrap = true;  // with replacement
  TreeParams tree{.max_depth = 12, .min_leaf_rows = 5};
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ForestParams from_json(const nlohmann::json& j, ForestParams defaults);
  static ForestParams from_json(const nlohmann::json& j) { return from_json(j, ForestParams{}); }
};

struct ForestModel {
  std::vector<TreeModel> trees;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);
};

// Bagged CART. Tree t draws its rows and its split features from substreams
// (seed, t), so the result does not depend on how trees are scheduled.
ForestModel forest_fit(const Eigen::MatrixXd& X, std::span<const double> y,
                       const ForestParams& params, const TreeFitInputs& inputs = {});

}  // namespace hetfx
