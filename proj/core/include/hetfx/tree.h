// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace hetfx {

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_leaf_rows = 1;
  // Only enforced when per-row school ids are supplied.
  std::size_t min_leaf_schools = 1;
  // Fraction of features tried at each split (at least one). 1.0 tries all
  // features and consumes no randomness.
  double feature_subsample = 1.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static TreeParams from_json(const nlohmann::json& j, TreeParams defaults);
  static TreeParams from_json(const nlohmann::json& j) { return from_json(j, TreeParams{}); }
};

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;      // weighted mean of the targets in the node
  std::size_t n_rows = 0;
  std::size_t n_schools = 0;  // distinct schools (0 when not tracked)

  bool is_leaf() const { return feature < 0; }
};

// Binary regression tree; node 0 is the root.
class TreeModel {
 public:
  TreeModel() = default;
  TreeModel(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t num_splits() const;
  std::size_t num_leaves() const { return nodes_.size() - num_splits(); }
  std::size_t depth() const;

  // Index of the leaf reached by row `x` (length n_features).
  std::size_t leaf_of(const double* x) const;
  template <typename Derived>
  std::size_t leaf_of_row(const Eigen::DenseBase<Derived>& x) const {
    std::size_t node = 0;
    while (!nodes_[node].is_leaf()) {
      const auto& n = nodes_[node];
      node = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
    }
    return node;
  }
  // ArgumentError when X has the wrong width.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  nlohmann::json to_json() const;
  static TreeModel from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

struct TreeFitInputs {
  std::span<const double> weights;          // empty: unit weights
  std::span<const std::size_t> school_ids;  // empty: no school tracking
};

// Greedy CART on weighted squared error. Candidate thresholds are midpoints
// between consecutive distinct sorted values; the split with the largest
// variance reduction wins, ties to the lower feature index then the lower
// threshold. A split is rejected when a child would violate min_leaf_rows
// or (with school ids) min_leaf_schools.
TreeModel tree_fit(const Eigen::MatrixXd& X, std::span<const double> y,
                   const TreeParams& params, const TreeFitInputs& inputs = {});

// Same kernel on an explicit sample list (row indices into X, duplicates
// allowed) as used by bagging.
TreeModel tree_fit_rows(const Eigen::MatrixXd& X, std::span<const double> y,
                        std::span<const std::size_t> rows, const TreeParams& params,
                        const TreeFitInputs& inputs = {});

}  // namespace hetfx
