// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetfx/cate_table.h"
#include "hetfx/dataset.h"
#include "hetfx/encoding.h"
#include "hetfx/forest.h"
#include "hetfx/tree.h"
#include "json.hpp"

namespace hetfx {

// ---- split-frequency importance ------------------------------------------

struct FeatureImportance {
  std::string feature;
  std::size_t split_count = 0;
  double frequency = 0.0;  // share of all split nodes
  std::size_t rank = 0;    // 1 = most used; ties keep feature order
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;  // feature order
  std::size_t total_splits = 0;
  bool no_heterogeneity = false;  // forest made no split at all

  // Features sorted by rank.
  std::vector<FeatureImportance> ranked() const;
  nlohmann::json to_json() const;
};

// Fits a forest to (features, tau_hat) and counts how often each feature
// is used to split a node, across all trees.
ImportanceReport feature_importance(const CateTable& cate, const FeatureMatrix& features,
                                    const ForestParams& params);
ImportanceReport importance_from_forest(const ForestModel& forest,
                                        const std::vector<std::string>& feature_names);

// ---- stratified summaries ------------------------------------------------

enum class Binning { kQuantile, kUniform };
std::string to_string(Binning b);
Binning binning_from_string(const std::string& s);

struct Stratum {
  std::string label;  // "[lo, hi]", "(lo, hi]" or the category
  double lo = 0.0;    // numeric bin bounds
  double hi = 0.0;
  std::string category;
  double mean = 0.0;  // NaN for an empty bin
  double min = 0.0;
  double max = 0.0;
  std::size_t n_students = 0;
  std::size_t n_schools = 0;
};

struct StratificationSummary {
  std::string covariate;
  Kind kind = Kind::kNumeric;
  Binning binning = Binning::kQuantile;
  std::vector<Stratum> strata;

  nlohmann::json to_json() const;
};

// Numeric covariates: bin edges at equally spaced quantiles of the observed
// values (or uniform over the range); the first bin is closed, the rest are
// (lo, hi]. Equal quantile edges merge. Categorical covariates get one
// stratum per observed category. ArgumentError on unknown covariate or
// length mismatch.
StratificationSummary stratify_cate(const CateTable& cate, const Dataset& dataset,
                                    const std::string& covariate, std::size_t n_bins,
                                    Binning binning = Binning::kQuantile);

// ---- interpretation trees ------------------------------------------------

struct LeafConstraints {
  std::size_t min_schools = 10;
  std::size_t min_students = 1;
};

// min_schools = 10; min_students = 1000 when any covariate is student-level.
LeafConstraints default_leaf_constraints(const Dataset& dataset,
                                         const std::vector<std::string>& covariates);

struct InterpretTree {
  TreeModel tree;
  Encoder encoder;  // raw units, selected covariates only
  std::vector<std::string> covariates;
  LeafConstraints constraints;

  const std::vector<std::string>& feature_names() const { return encoder.feature_names(); }
  Eigen::VectorXd predict(const Dataset& data) const;
  nlohmann::json to_json() const;
};

// CART of tau_hat on the selected covariates in raw units. Every leaf holds
// at least min_schools distinct schools and min_students rows. FitError when
// the whole dataset cannot satisfy the constraints.
InterpretTree interpret_tree_fit(const CateTable& cate, const Dataset& dataset,
                                 const std::vector<std::string>& covariates,
                                 std::optional<LeafConstraints> constraints = std::nullopt,
                                 std::size_t max_depth = 3);

struct RuleCondition {
  std::size_t feature = 0;
  std::string name;
  bool less_equal = true;  // x <= threshold, otherwise x > threshold
  double threshold = 0.0;

  bool holds(const double* x) const { return less_equal ? x[feature] <= threshold : x[feature] > threshold; }
};

struct Rule {
  std::vector<RuleCondition> conditions;  // root to leaf
  std::size_t leaf = 0;                   // node index
  double value = 0.0;
  std::size_t n_students = 0;
  std::size_t n_schools = 0;

  bool matches(const double* x) const;
  std::string to_string() const;
};

// One rule per leaf in depth-first (left first) order.
std::vector<Rule> export_rules(const InterpretTree& tree);
std::vector<Rule> export_rules(const TreeModel& tree, const std::vector<std::string>& feature_names);
nlohmann::json rules_to_json(const std::vector<Rule>& rules);
std::string rules_to_text(const std::vector<Rule>& rules);
// Value of the first matching rule for every row of X.
Eigen::VectorXd predict_rules(const std::vector<Rule>& rules, const Eigen::MatrixXd& X);

// Leaf assignment over an n x n grid spanning the observed range of the two
// tree features (which must be the only encoded features).
struct PairGridCell {
  double x = 0.0;
  double y = 0.0;
  std::size_t leaf = 0;
  double leaf_mean = 0.0;
};
std::vector<PairGridCell> pair_grid(const InterpretTree& tree, const Dataset& dataset,
                                    std::size_t n = 50);
void write_pair_grid_csv(const std::vector<PairGridCell>& grid, const std::filesystem::path& path);

}  // namespace hetfx
