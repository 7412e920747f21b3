// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/learners.h"

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {

std::string to_string(Family f) {
  switch (f) {
    case Family::kRidge: return "ridge";
    case Family::kTree: return "tree";
    case Family::kForest: return "forest";
    case Family::kGbm: return "gbm";
    case Family::kMlp: return "mlp";
  }
  return "ridge";
}

Family family_from_string(const std::string& s) {
  if (s == "ridge") return Family::kRidge;
  if (s == "tree") return Family::kTree;
  if (s == "forest") return Family::kForest;
  if (s == "gbm") return Family::kGbm;
  if (s == "mlp") return Family::kMlp;
  throw ArgumentError("unknown estimator family '" + s + "'");
}

EstimatorConfig EstimatorConfig::with_seed(std::uint64_t seed) const {
  EstimatorConfig c = *this;
  c.tree.seed = seed;
  c.forest.seed = seed;
  c.gbm.seed = seed;
  c.mlp.seed = seed;
  return c;
}

void EstimatorConfig::validate() const {
  if (!(ridge_lambda >= 0.0)) throw ArgumentError("ridge_lambda must be >= 0");
  auto check_tree = [](const TreeParams& t) {
    if (t.min_leaf_rows < 1 || t.min_leaf_schools < 1) throw ArgumentError("tree leaf minimums must be >= 1");
  };
  check_tree(tree);
  check_tree(forest.tree);
  check_tree(gbm.tree);
  if (forest.n_trees < 1) throw ArgumentError("forest n_trees must be >= 1");
  if (!(forest.feature_subsample > 0.0 && forest.feature_subsample <= 1.0)) {
    throw ArgumentError("forest feature_subsample must be in (0, 1]");
  }
  if (!(forest.row_subsample > 0.0 && forest.row_subsample <= 1.0)) {
    throw ArgumentError("forest row_subsample must be in (0, 1]");
  }
  if (gbm.n_rounds < 1) throw ArgumentError("gbm n_rounds must be >= 1");
  if (!(gbm.learning_rate > 0.0 && gbm.learning_rate <= 1.0)) {
    throw ArgumentError("gbm learning_rate must be in (0, 1]");
  }
  if (mlp.epochs < 1 || mlp.batch_size < 1) throw ArgumentError("mlp epochs and batch_size must be >= 1");
  if (!(mlp.optimizer.learning_rate > 0.0)) throw ArgumentError("mlp learning_rate must be > 0");
}

nlohmann::json EstimatorConfig::to_json() const {
  nlohmann::json j = {{"family", to_string(family)}};
  switch (family) {
    case Family::kRidge: j["lambda"] = ridge_lambda; break;
    case Family::kTree: j["tree"] = tree.to_json(); break;
    case Family::kForest: j["forest"] = forest.to_json(); break;
    case Family::kGbm: j["gbm"] = gbm.to_json(); break;
    case Family::kMlp: j["mlp"] = mlp.to_json(); break;
  }
  return j;
}

EstimatorConfig EstimatorConfig::from_json(const nlohmann::json& j) {
  EstimatorConfig c;
  try {
    c.family = family_from_string(j.at("family").get<std::string>());
    switch (c.family) {
      case Family::kRidge:
        c.ridge_lambda = j.value("lambda", j.value("ridge_lambda", c.ridge_lambda));
        break;
      case Family::kTree:
        c.tree = TreeParams::from_json(j.contains("tree") ? j.at("tree") : j, c.tree);
        break;
      case Family::kForest:
        c.forest = ForestParams::from_json(j.contains("forest") ? j.at("forest") : j, c.forest);
        break;
      case Family::kGbm:
        c.gbm = GbmParams::from_json(j.contains("gbm") ? j.at("gbm") : j, c.gbm);
        break;
      case Family::kMlp:
        c.mlp = MlpParams::from_json(j.contains("mlp") ? j.at("mlp") : j, c.mlp);
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("estimator config: ") + e.what());
  }
  c.validate();
  return c;
}

Family FittedModel::family() const {
  return static_cast<Family>(impl_.index());
}

const std::vector<double>& FittedModel::loss_trace() const {
  static const std::vector<double> kEmpty;
  if (auto* g = std::get_if<GbmModel>(&impl_)) return g->loss_trace;
  if (auto* m = std::get_if<MlpModel>(&impl_)) return m->loss_trace;
  return kEmpty;
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != input_width_) {
    throw ArgumentError("predict: model expects " + std::to_string(input_width_) +
                        " features, got " + std::to_string(X.cols()));
  }
  return std::visit([&](const auto& m) -> Eigen::VectorXd { return m.predict(X); }, impl_);
}

nlohmann::json FittedModel::to_json() const {
  return {{"format_version", kModelFormatVersion},
          {"family", to_string(family())},
          {"input_width", input_width_},
          {"seed", seed_},
          {"model", std::visit([](const auto& m) { return m.to_json(); }, impl_)}};
}

FittedModel FittedModel::from_json(const nlohmann::json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw ArgumentError("unsupported model format_version " + std::to_string(version));
  }
  const Family family = family_from_string(j.at("family").get<std::string>());
  const auto& mj = j.at("model");
  Impl impl;
  switch (family) {
    case Family::kRidge: impl = RidgeModel::from_json(mj); break;
    case Family::kTree: impl = TreeModel::from_json(mj); break;
    case Family::kForest: impl = ForestModel::from_json(mj); break;
    case Family::kGbm: impl = GbmModel::from_json(mj); break;
    case Family::kMlp: impl = MlpModel::from_json(mj); break;
  }
  return FittedModel(std::move(impl), j.at("input_width").get<std::size_t>(),
                     j.value("seed", std::uint64_t{0}));
}

FittedModel fit(const EstimatorConfig& config, const Eigen::MatrixXd& X,
                std::span<const double> y, const TreeFitInputs& inputs) {
  config.validate();
  const auto width = static_cast<std::size_t>(X.cols());
  switch (config.family) {
    case Family::kRidge:
      return FittedModel(ridge_fit(X, y, config.ridge_lambda, inputs.weights), width);
    case Family::kTree:
      return FittedModel(tree_fit(X, y, config.tree, inputs), width, config.tree.seed);
    case Family::kForest:
      return FittedModel(forest_fit(X, y, config.forest, inputs), width, config.forest.seed);
    case Family::kGbm:
      return FittedModel(gbm_fit(X, y, config.gbm, inputs), width, config.gbm.seed);
    case Family::kMlp:
      return FittedModel(mlp_fit(X, y, config.mlp), width, config.mlp.seed);
  }
  throw ArgumentError("unknown family");
}

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& X) {
  return model.predict(X);
}

}  // namespace hetfx
