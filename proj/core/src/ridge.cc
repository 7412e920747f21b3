// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/ridge.h"

#include <cmath>

#include "hetfx/errors.h"

namespace hetfx {

Eigen::VectorXd RidgeModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != coefficients.size()) {
    throw ArgumentError("predict: expected " + std::to_string(coefficients.size()) +
                        " features, got " + std::to_string(X.cols()));
  }
  return (X * coefficients).array() + intercept;
}

double RidgeModel::objective(const Eigen::MatrixXd& X, std::span<const double> y,
                             const Eigen::VectorXd& coefficients, double intercept, double lambda) {
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd r = (X * coefficients).array() + intercept - yv.array();
  return r.squaredNorm() / static_cast<double>(y.size()) + lambda * coefficients.squaredNorm();
}

nlohmann::json RidgeModel::to_json() const {
  return {{"coefficients", std::vector<double>(coefficients.data(), coefficients.data() + coefficients.size())},
          {"intercept", intercept},
          {"lambda", lambda},
          {"rank_deficient", rank_deficient}};
}

RidgeModel RidgeModel::from_json(const nlohmann::json& j) {
  RidgeModel m;
  const auto c = j.at("coefficients").get<std::vector<double>>();
  m.coefficients = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  m.intercept = j.at("intercept").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.rank_deficient = j.value("rank_deficient", false);
  return m;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& X, std::span<const double> y, double lambda,
                     std::span<const double> weights) {
  const auto m = static_cast<Eigen::Index>(y.size());
  if (m == 0 || X.rows() != m) throw ArgumentError("ridge_fit: X rows must equal len(y) >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("ridge_fit: lambda must be >= 0");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != m) {
    throw ArgumentError("ridge_fit: weight count does not match rows");
  }
  Eigen::VectorXd w = weights.empty()
                          ? Eigen::VectorXd::Ones(m)
                          : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(weights.data(), m));
  const double wsum = w.sum();
  if (!(wsum > 0.0)) throw ArgumentError("ridge_fit: weights must sum to a positive value");
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), m);

  const Eigen::RowVectorXd x_mean = (w.transpose() * X) / wsum;
  const double y_mean = w.dot(yv) / wsum;
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::VectorXd yc = yv.array() - y_mean;
  const Eigen::MatrixXd Xw = Xc.array().colwise() * w.array();

  const auto d = X.cols();
  Eigen::MatrixXd gram = (Xw.transpose() * Xc) / wsum;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = (Xw.transpose() * yc) / wsum;

  RidgeModel model;
  model.lambda = lambda;
  if (d == 0) {
    model.coefficients = Eigen::VectorXd(0);
  } else if (lambda > 0.0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    model.coefficients = ldlt.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    model.coefficients = cod.solve(rhs);
    model.rank_deficient = cod.rank() < d;
  }
  model.intercept = y_mean - x_mean.dot(model.coefficients);
  return model;
}

}  // namespace hetfx
