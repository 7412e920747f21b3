// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {
namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, std::span<const double> y,
              std::span<const std::size_t> rows, const TreeParams& params,
              const TreeFitInputs& inputs)
      : X_(X), y_(y), rows_(rows), params_(params), inputs_(inputs),
        engine_(make_engine(params.seed, 0)) {
    const std::size_t d = static_cast<std::size_t>(X.cols());
    const std::size_t ns = rows.size();
    track_schools_ = !inputs.school_ids.empty();
    if (track_schools_) {
      std::size_t max_id = 0;
      for (auto r : rows) max_id = std::max(max_id, inputs.school_ids[r]);
      left_count_.assign(max_id + 1, 0);
      right_count_.assign(max_id + 1, 0);
    }
    order_.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      auto& ord = order_[f];
      ord.resize(ns);
      std::iota(ord.begin(), ord.end(), 0u);
      const auto col = X.col(static_cast<Eigen::Index>(f));
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
        return col(static_cast<Eigen::Index>(rows[a])) < col(static_cast<Eigen::Index>(rows[b]));
      });
    }
    goes_left_.assign(ns, 0);
    scratch_.resize(ns);
    // A canonical sample order for node statistics when there are no features.
    if (d == 0) {
      plain_.resize(ns);
      std::iota(plain_.begin(), plain_.end(), 0u);
    }
  }

  TreeModel build() {
    build_node(0, rows_.size(), 0);
    return TreeModel(std::move(nodes_), static_cast<std::size_t>(X_.cols()));
  }

 private:
  double w(std::size_t sample) const {
    return inputs_.weights.empty() ? 1.0 : inputs_.weights[rows_[sample]];
  }
  double target(std::size_t sample) const { return y_[rows_[sample]]; }
  double x(std::size_t sample, std::size_t f) const {
    return X_(static_cast<Eigen::Index>(rows_[sample]), static_cast<Eigen::Index>(f));
  }
  std::size_t school(std::size_t sample) const { return inputs_.school_ids[rows_[sample]]; }
  const std::vector<std::uint32_t>& any_order() const {
    return order_.empty() ? plain_ : order_[0];
  }

  int build_node(std::size_t begin, std::size_t end, std::size_t depth) {
    const auto& ord = any_order();
    double wsum = 0.0, wy = 0.0;
    double ymin = target(ord[begin]), ymax = ymin;
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = ord[i];
      wsum += w(s);
      wy += w(s) * target(s);
      ymin = std::min(ymin, target(s));
      ymax = std::max(ymax, target(s));
    }
    const double mean = wsum > 0.0 ? wy / wsum : 0.0;
    double sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double dlt = target(ord[i]) - mean;
      sse += w(ord[i]) * dlt * dlt;
    }
    std::size_t n_schools = 0;
    if (track_schools_) {
      for (std::size_t i = begin; i < end; ++i) {
        if (right_count_[school(ord[i])]++ == 0) ++n_schools;
      }
      for (std::size_t i = begin; i < end; ++i) right_count_[school(ord[i])] = 0;
    }

    const int id = static_cast<int>(nodes_.size());
    TreeNode node;
    node.value = mean == 0.0 ? 0.0 : mean;
    node.n_rows = end - begin;
    node.n_schools = n_schools;
    nodes_.push_back(node);

    const std::size_t n = end - begin;
    const bool can_split = depth < params_.max_depth && n >= 2 * params_.min_leaf_rows &&
                           ymin != ymax && sse > 0.0 &&
                           (!track_schools_ || n_schools >= 2 * params_.min_leaf_schools);
    if (!can_split) return id;

    const auto best = find_split(begin, end, mean, sse, n_schools);
    if (best.feature < 0) return id;

    // Stable partition of every feature's segment.
    const auto& split_ord = order_[static_cast<std::size_t>(best.feature)];
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = split_ord[i];
      goes_left_[s] = x(s, static_cast<std::size_t>(best.feature)) <= best.threshold ? 1 : 0;
    }
    std::size_t n_left = 0;
    for (auto& ord_f : order_) {
      std::size_t l = begin, r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto s = ord_f[i];
        if (goes_left_[s]) {
          ord_f[l++] = s;
        } else {
          scratch_[r++] = s;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r),
                ord_f.begin() + static_cast<std::ptrdiff_t>(l));
      n_left = l - begin;
    }
    const std::size_t mid = begin + n_left;
    const int left = build_node(begin, mid, depth + 1);
    const int right = build_node(mid, end, depth + 1);
    auto& self = nodes_[static_cast<std::size_t>(id)];
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.left = left;
    self.right = right;
    return id;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = order_.size();
    std::vector<std::size_t> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    if (params_.feature_subsample >= 1.0 || d <= 1) return feats;
    const auto k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(params_.feature_subsample * static_cast<double>(d))), 1, d);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(engine_, d - i);
      std::swap(feats[i], feats[j]);
    }
    feats.resize(k);
    std::sort(feats.begin(), feats.end());
    return feats;
  }

  Split find_split(std::size_t begin, std::size_t end, double mean, double sse,
                   std::size_t n_schools) {
    Split best;
    const std::size_t n = end - begin;
    // Sums of weights, and of weighted centred targets and their squares.
    double tw = 0.0, t1 = 0.0, t2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = any_order()[i];
      const double c = target(s) - mean;
      tw += w(s);
      t1 += w(s) * c;
      t2 += w(s) * c * c;
    }
    for (const std::size_t f : candidate_features()) {
      const auto& ord = order_[f];
      if (x(ord[begin], f) == x(ord[end - 1], f)) continue;
      std::size_t left_schools = 0, right_schools = n_schools;
      if (track_schools_) {
        for (std::size_t i = begin; i < end; ++i) ++right_count_[school(ord[i])];
      }
      double lw = 0.0, l1 = 0.0, l2 = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const auto s = ord[i];
        const double c = target(s) - mean;
        lw += w(s);
        l1 += w(s) * c;
        l2 += w(s) * c * c;
        if (track_schools_) {
          const auto sc = school(s);
          if (left_count_[sc]++ == 0) ++left_schools;
          if (--right_count_[sc] == 0) --right_schools;
        }
        const std::size_t n_left = i + 1 - begin;
        const double xv = x(s, f);
        const double xn = x(ord[i + 1], f);
        if (xv == xn) continue;
        if (n_left < params_.min_leaf_rows || n - n_left < params_.min_leaf_rows) continue;
        if (track_schools_ && (left_schools < params_.min_leaf_schools ||
                               right_schools < params_.min_leaf_schools)) {
          continue;
        }
        const double rw = tw - lw;
        if (lw <= 0.0 || rw <= 0.0) continue;
        const double r1 = t1 - l1;
        const double r2 = t2 - l2;
        const double sse_left = std::max(0.0, l2 - l1 * l1 / lw);
        const double sse_right = std::max(0.0, r2 - r1 * r1 / rw);
        const double gain = sse - sse_left - sse_right;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          double thr = 0.5 * (xv + xn);
          if (!(thr >= xv && thr < xn)) thr = xv;
          best.threshold = thr;
        }
      }
      if (track_schools_) {
        for (std::size_t i = begin; i < end; ++i) {
          left_count_[school(ord[i])] = 0;
          right_count_[school(ord[i])] = 0;
        }
      }
    }
    if (best.feature >= 0 && !(best.gain > 1e-12 * sse)) best.feature = -1;
    return best;
  }

  const Eigen::MatrixXd& X_;
  std::span<const double> y_;
  std::span<const std::size_t> rows_;
  TreeParams params_;
  TreeFitInputs inputs_;
  Engine engine_;
  bool track_schools_ = false;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint32_t> plain_;
  std::vector<char> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::size_t> left_count_;
  std::vector<std::size_t> right_count_;
  std::vector<TreeNode> nodes_;
};

void validate_inputs(const Eigen::MatrixXd& X, std::span<const double> y,
                     std::span<const std::size_t> rows, const TreeParams& params,
                     const TreeFitInputs& inputs) {
  if (rows.empty() || X.rows() == 0) throw ArgumentError("tree_fit: empty input");
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ArgumentError("tree_fit: X has " + std::to_string(X.rows()) + " rows but y has " +
                        std::to_string(y.size()));
  }
  if (!inputs.weights.empty() && inputs.weights.size() != y.size()) {
    throw ArgumentError("tree_fit: weight count does not match rows");
  }
  if (!inputs.school_ids.empty() && inputs.school_ids.size() != y.size()) {
    throw ArgumentError("tree_fit: school id count does not match rows");
  }
  if (params.min_leaf_rows < 1) throw ArgumentError("tree_fit: min_leaf_rows must be >= 1");
  if (params.min_leaf_schools < 1) throw ArgumentError("tree_fit: min_leaf_schools must be >= 1");
  if (!(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0)) {
    throw ArgumentError("tree_fit: feature_subsample must be in (0, 1]");
  }
  for (auto r : rows) {
    if (r >= y.size()) throw ArgumentError("tree_fit: sample row out of range");
  }
}

}  // namespace

nlohmann::json TreeParams::to_json() const {
  return {{"max_depth", max_depth},
          {"min_leaf_rows", min_leaf_rows},
          {"min_leaf_schools", min_leaf_schools},
          {"feature_subsample", feature_subsample},
          {"seed", seed}};
}

TreeParams TreeParams::from_json(const nlohmann::json& j, TreeParams p) {
  p.max_depth = j.value("max_depth", p.max_depth);
  p.min_leaf_rows = j.value("min_leaf_rows", p.min_leaf_rows);
  p.min_leaf_schools = j.value("min_leaf_schools", p.min_leaf_schools);
  p.feature_subsample = j.value("feature_subsample", p.feature_subsample);
  p.seed = j.value("seed", p.seed);
  return p;
}

std::size_t TreeModel::num_splits() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::size_t TreeModel::depth() const {
  // Nodes are created depth-first with children after parents.
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t TreeModel::leaf_of(const double* x) const {
  std::size_t node = 0;
  while (!nodes_[node].is_leaf()) {
    const auto& n = nodes_[node];
    node = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
  }
  return node;
}

Eigen::VectorXd TreeModel::predict(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_features_) {
    throw ArgumentError("predict: expected " + std::to_string(n_features_) + " features, got " +
                        std::to_string(X.cols()));
  }
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) = nodes_[leaf_of_row(X.row(r))].value;
  return out;
}

nlohmann::json TreeModel::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.n_rows, n.n_schools});
  }
  return {{"n_features", n_features_}, {"nodes", nodes}};
}

TreeModel TreeModel::from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& a : j.at("nodes")) {
    TreeNode n;
    n.feature = a.at(0).get<int>();
    n.threshold = a.at(1).get<double>();
    n.left = a.at(2).get<int>();
    n.right = a.at(3).get<int>();
    n.value = a.at(4).get<double>();
    n.n_rows = a.at(5).get<std::size_t>();
    n.n_schools = a.at(6).get<std::size_t>();
    nodes.push_back(n);
  }
  return TreeModel(std::move(nodes), j.at("n_features").get<std::size_t>());
}

TreeModel tree_fit_rows(const Eigen::MatrixXd& X, std::span<const double> y,
                        std::span<const std::size_t> rows, const TreeParams& params,
                        const TreeFitInputs& inputs) {
  validate_inputs(X, y, rows, params, inputs);
  return TreeBuilder(X, y, rows, params, inputs).build();
}

TreeModel tree_fit(const Eigen::MatrixXd& X, std::span<const double> y, const TreeParams& params,
                   const TreeFitInputs& inputs) {
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), 0);
  if (y.empty()) throw ArgumentError("tree_fit: empty input");
  return tree_fit_rows(X, y, rows, params, inputs);
}

}  // namespace hetfx
