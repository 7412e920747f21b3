// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/gbm.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {

nlohmann::json GbmParams::to_json() const {
  return {{"n_rounds", n_rounds},
          {"learning_rate", learning_rate},
          {"tree", tree.to_json()},
          {"row_subsample", row_subsample},
          {"seed", seed}};
}

GbmParams GbmParams::from_json(const nlohmann::json& j, GbmParams p) {
  p.n_rounds = j.value("n_rounds", p.n_rounds);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.row_subsample = j.value("row_subsample", p.row_subsample);
  if (j.contains("tree")) p.tree = TreeParams::from_json(j.at("tree"), p.tree);
  for (const char* key : {"max_depth", "min_leaf_rows", "min_leaf_schools"}) {
    if (j.contains(key)) p.tree = TreeParams::from_json({{key, j.at(key)}}, p.tree);
  }
  p.seed = j.value("seed", p.seed);
  return p;
}

Eigen::VectorXd GbmModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), base);
  for (const auto& t : trees) out += learning_rate * t.predict(X);
  return out;
}

nlohmann::json GbmModel::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"base", base}, {"learning_rate", learning_rate}, {"trees", arr}, {"loss_trace", loss_trace}};
}

GbmModel GbmModel::from_json(const nlohmann::json& j) {
  GbmModel g;
  g.base = j.at("base").get<double>();
  g.learning_rate = j.at("learning_rate").get<double>();
  for (const auto& t : j.at("trees")) g.trees.push_back(TreeModel::from_json(t));
  g.loss_trace = j.value("loss_trace", std::vector<double>{});
  return g;
}

GbmModel gbm_fit(const Eigen::MatrixXd& X, std::span<const double> y, const GbmParams& params,
                 const TreeFitInputs& inputs) {
  if (params.n_rounds < 1) throw ArgumentError("gbm_fit: n_rounds must be >= 1");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw ArgumentError("gbm_fit: learning_rate must be in (0, 1]");
  }
  if (!(params.row_subsample > 0.0 && params.row_subsample <= 1.0)) {
    throw ArgumentError("gbm_fit: row_subsample must be in (0, 1]");
  }
  const std::size_t m = y.size();
  if (m == 0 || static_cast<std::size_t>(X.rows()) != m) throw ArgumentError("gbm_fit: empty or mismatched input");

  GbmModel model;
  model.learning_rate = params.learning_rate;
  model.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  std::vector<double> fitted(m, model.base);
  std::vector<double> residual(m);
  auto mse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    return s / static_cast<double>(m);
  };
  model.loss_trace.push_back(mse());

  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.row_subsample * static_cast<double>(m))));
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < m; ++i) residual[i] = y[i] - fitted[i];
    std::vector<std::size_t> rows = all;
    if (k < m) {
      Engine engine = make_engine(params.seed, round);
      std::shuffle(rows.begin(), rows.end(), engine);
      rows.resize(k);
      std::sort(rows.begin(), rows.end());
    }
    TreeParams tp = params.tree;
    tp.seed = derive_seed(params.seed, round, 1);
    TreeModel tree = tree_fit_rows(X, residual, rows, tp, inputs);
    for (std::size_t i = 0; i < m; ++i) {
      fitted[i] += params.learning_rate *
                   tree.nodes()[tree.leaf_of_row(X.row(static_cast<Eigen::Index>(i)))].value;
    }
    model.trees.push_back(std::move(tree));
    model.loss_trace.push_back(mse());
  }
  return model;
}

}  // namespace hetfx
