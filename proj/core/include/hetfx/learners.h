// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "hetfx/forest.h"
#include "hetfx/gbm.h"
#include "hetfx/mlp.h"
#include "hetfx/ridge.h"
#include "hetfx/tree.h"
#include "json.hpp"

namespace hetfx {

enum class Family { kRidge, kTree, kForest, kGbm, kMlp };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Configuration of one base regression estimator. Only the block matching
// `family` is used.
struct EstimatorConfig {
  Family family = Family::kRidge;
  double ridge_lambda = 1e-2;
  TreeParams tree{.max_depth = 6, .min_leaf_rows = 20};
  ForestParams forest;
  GbmParams gbm;
  MlpParams mlp;

  // Copy with every family's seed replaced.
  EstimatorConfig with_seed(std::uint64_t seed) const;
  void validate() const;  // ArgumentError

  // The family tag plus that family's parameter block.
  nlohmann::json to_json() const;
  // Reads {"family": ..., <params>} over the defaults. Flat keys such as
  // "lambda", "max_depth" or "n_trees" are accepted for the chosen family.
  static EstimatorConfig from_json(const nlohmann::json& j);
};

inline constexpr int kModelFormatVersion = 1;

// A fitted base estimator: a pure function of its parameters.
class FittedModel {
 public:
  using Impl = std::variant<RidgeModel, TreeModel, ForestModel, GbmModel, MlpModel>;

  FittedModel() = default;
  FittedModel(Impl impl, std::size_t input_width, std::uint64_t seed = 0)
      : impl_(std::move(impl)), input_width_(input_width), seed_(seed) {}

  Family family() const;
  std::size_t input_width() const { return input_width_; }
  std::uint64_t seed() const { return seed_; }
  const Impl& impl() const { return impl_; }
  template <typename T>
  const T& as() const { return std::get<T>(impl_); }

  // Loss trace for iterative families (empty otherwise).
  const std::vector<double>& loss_trace() const;

  // ArgumentError on width mismatch.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  // Versioned document {"format_version", "family", "input_width", "seed", "model"}.
  nlohmann::json to_json() const;
  static FittedModel from_json(const nlohmann::json& j);

 private:
  Impl impl_;
  std::size_t input_width_ = 0;
  std::uint64_t seed_ = 0;
};

FittedModel fit(const EstimatorConfig& config, const Eigen::MatrixXd& X,
                std::span<const double> y, const TreeFitInputs& inputs = {});

Eigen::VectorXd predict(const FittedModel& model, const Eigen::MatrixXd& X);

}  // namespace hetfx
