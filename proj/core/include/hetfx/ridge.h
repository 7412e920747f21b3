// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <span>

#include "json.hpp"

namespace hetfx {

// f(x) = intercept + x . coefficients, fitted by minimizing
//   (1/sum w) * sum_i w_i (y_i - f(x_i))^2 + lambda * ||coefficients||^2
// with the intercept unpenalized.
struct RidgeModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  // Set when lambda == 0 and the centred Gram matrix is singular; the
  // minimum-norm least-squares solution is returned.
  bool rank_deficient = false;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  // Penalized objective at the given parameters (unit weights).
  static double objective(const Eigen::MatrixXd& X, std::span<const double> y,
                          const Eigen::VectorXd& coefficients, double intercept, double lambda);

  nlohmann::json to_json() const;
  static RidgeModel from_json(const nlohmann::json& j);
};

RidgeModel ridge_fit(const Eigen::MatrixXd& X, std::span<const double> y, double lambda,
                     std::span<const double> weights = {});

}  // namespace hetfx
