// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/errors.h"
#include "hetfx/parallel.h"
#include "hetfx/random.h"

namespace hetfx {

nlohmann::json ForestParams::to_json() const {
  return {{"n_trees", n_trees},
          {"feature_subsample", feature_subsample},
          {"row_subsample", row_subsample},
          {"bootstrap", bootstrap},
          {"tree", tree.to_json()},
          {"seed", seed}};
}

ForestParams ForestParams::from_json(const nlohmann::json& j, ForestParams p) {
  p.n_trees = j.value("n_trees", p.n_trees);
  p.feature_subsample = j.value("feature_subsample", p.feature_subsample);
  p.row_subsample = j.value("row_subsample", p.row_subsample);
  p.bootstrap = j.value("bootstrap", p.bootstrap);
  if (j.contains("tree")) p.tree = TreeParams::from_json(j.at("tree"), p.tree);
  for (const char* key : {"max_depth", "min_leaf_rows", "min_leaf_schools"}) {
    if (j.contains(key)) p.tree = TreeParams::from_json({{key, j.at(key)}}, p.tree);
  }
  p.seed = j.value("seed", p.seed);
  return p;
}

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  for (const auto& t : trees) out += t.predict(X);
  return out / static_cast<double>(trees.size());
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return {{"trees", arr}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  ForestModel f;
  for (const auto& t : j.at("trees")) f.trees.push_back(TreeModel::from_json(t));
  return f;
}

ForestModel forest_fit(const Eigen::MatrixXd& X, std::span<const double> y,
                       const ForestParams& params, const TreeFitInputs& inputs) {
  if (params.n_trees < 1) throw ArgumentError("forest_fit: n_trees must be >= 1");
  if (!(params.row_subsample > 0.0 && params.row_subsample <= 1.0)) {
    throw ArgumentError("forest_fit: row_subsample must be in (0, 1]");
  }
  const std::size_t m = y.size();
  if (m == 0) throw ArgumentError("forest_fit: empty input");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.row_subsample * static_cast<double>(m))));

  ForestModel model;
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    Engine engine = make_engine(params.seed, t);
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      rows.resize(k);
      for (auto& r : rows) r = uniform_index(engine, m);
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(m);
      std::iota(rows.begin(), rows.end(), 0);
      if (k < m) {
        std::shuffle(rows.begin(), rows.end(), engine);
        rows.resize(k);
        std::sort(rows.begin(), rows.end());
      }
    }
    TreeParams tp = params.tree;
    tp.feature_subsample = params.feature_subsample;
    tp.seed = derive_seed(params.seed, t, 1);
    model.trees[t] = tree_fit_rows(X, y, rows, tp, inputs);
  });
  return model;
}

}  // namespace hetfx
