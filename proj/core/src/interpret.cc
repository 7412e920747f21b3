// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/interpret.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "hetfx/errors.h"
#include "hetfx/inference.h"

namespace hetfx {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_aligned(const CateTable& cate, std::size_t rows, const char* what) {
  if (cate.size() != rows) {
    throw ArgumentError(std::string(what) + ": CATE table has " + std::to_string(cate.size()) +
                        " rows but the data has " + std::to_string(rows));
  }
}

void collect_rules(const TreeModel& tree, const std::vector<std::string>& names, std::size_t node,
                   std::vector<RuleCondition>& path, std::vector<Rule>& out) {
  const TreeNode& n = tree.nodes()[node];
  if (n.is_leaf()) {
    out.push_back({path, node, n.value, n.n_rows, n.n_schools});
    return;
  }
  const auto f = static_cast<std::size_t>(n.feature);
  const std::string& name = f < names.size() ? names[f] : "x" + std::to_string(f);
  path.push_back({f, name, true, n.threshold});
  collect_rules(tree, names, static_cast<std::size_t>(n.left), path, out);
  path.back().less_equal = false;
  collect_rules(tree, names, static_cast<std::size_t>(n.right), path, out);
  path.pop_back();
}

const ColumnSpec* find_spec(const Schema& schema, const std::string& name) {
  const auto idx = schema.find(name);
  return idx ? &schema.column(*idx) : nullptr;
}

}  // namespace

// ---- importance ----------------------------------------------------------

std::vector<FeatureImportance> ImportanceReport::ranked() const {
  auto out = features;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return out;
}

nlohmann::json ImportanceReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& f : ranked()) {
    rows.push_back({{"feature", f.feature}, {"split_count", f.split_count},
                    {"split_frequency", f.frequency}, {"rank", f.rank}});
  }
  return {{"features", rows}, {"total_splits", total_splits}, {"no_heterogeneity", no_heterogeneity}};
}

ImportanceReport importance_from_forest(const ForestModel& forest,
                                        const std::vector<std::string>& feature_names) {
  ImportanceReport report;
  report.features.resize(feature_names.size());
  for (std::size_t f = 0; f < feature_names.size(); ++f) report.features[f].feature = feature_names[f];
  for (const auto& tree : forest.trees) {
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) continue;
      ++report.features.at(static_cast<std::size_t>(node.feature)).split_count;
      ++report.total_splits;
    }
  }
  report.no_heterogeneity = report.total_splits == 0;
  std::vector<std::size_t> order(feature_names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.features[a].split_count > report.features[b].split_count;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& f = report.features[order[r]];
    f.rank = r + 1;
    f.frequency = report.total_splits == 0
                      ? 0.0
                      : static_cast<double>(f.split_count) / static_cast<double>(report.total_splits);
  }
  return report;
}

ImportanceReport feature_importance(const CateTable& cate, const FeatureMatrix& features,
                                    const ForestParams& params) {
  check_aligned(cate, features.rows(), "feature_importance");
  const ForestModel forest = forest_fit(features.values, cate.tau_hat, params);
  return importance_from_forest(forest, features.feature_names);
}

// ---- stratification ------------------------------------------------------

std::string to_string(Binning b) { return b == Binning::kQuantile ? "quantile" : "uniform"; }

Binning binning_from_string(const std::string& s) {
  if (s == "quantile") return Binning::kQuantile;
  if (s == "uniform") return Binning::kUniform;
  throw ArgumentError("unknown binning '" + s + "' (expected quantile or uniform)");
}

nlohmann::json StratificationSummary::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : strata) {
    nlohmann::json r = {{"label", s.label},           {"mean", s.mean},
                        {"min", s.min},               {"max", s.max},
                        {"n_students", s.n_students}, {"n_schools", s.n_schools}};
    if (kind == Kind::kNumeric) {
      r["lo"] = s.lo;
      r["hi"] = s.hi;
    } else {
      r["category"] = s.category;
    }
    rows.push_back(std::move(r));
  }
  return {{"covariate", covariate},
          {"kind", hetfx::to_string(kind)},
          {"binning", kind == Kind::kNumeric ? to_string(binning) : "category"},
          {"strata", rows}};
}

StratificationSummary stratify_cate(const CateTable& cate, const Dataset& dataset,
                                    const std::string& covariate, std::size_t n_bins,
                                    Binning binning) {
  check_aligned(cate, dataset.num_rows(), "stratify_cate");
  const ColumnSpec* spec = find_spec(dataset.schema(), covariate);
  if (!spec || spec->role != Role::kCovariate) throw ArgumentError("unknown covariate '" + covariate + "'");
  const Column& col = dataset.column(covariate);
  const std::size_t m = dataset.num_rows();

  StratificationSummary out;
  out.covariate = covariate;
  out.kind = spec->kind;
  out.binning = binning;

  std::vector<std::size_t> stratum_of(m);
  if (spec->kind == Kind::kCategorical) {
    const std::set<std::string> cats(col.labels.begin(), col.labels.end());
    const std::vector<std::string> ordered(cats.begin(), cats.end());
    for (const auto& c : ordered) {
      Stratum s;
      s.label = c;
      s.category = c;
      out.strata.push_back(s);
    }
    for (std::size_t i = 0; i < m; ++i) {
      stratum_of[i] = static_cast<std::size_t>(
          std::lower_bound(ordered.begin(), ordered.end(), col.labels[i]) - ordered.begin());
    }
  } else {
    if (n_bins < 1) throw ArgumentError("stratify_cate: n_bins must be >= 1");
    std::vector<double> sorted = col.numbers;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (std::size_t k = 0; k <= n_bins; ++k) {
      const double q = static_cast<double>(k) / static_cast<double>(n_bins);
      const double e = binning == Binning::kQuantile
                           ? quantile_sorted(sorted, q)
                           : sorted.front() + q * (sorted.back() - sorted.front());
      if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    edges.back() = sorted.back();
    if (edges.size() == 1) edges.push_back(edges.front());
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      Stratum s;
      s.lo = edges[b];
      s.hi = edges[b + 1];
      s.label = std::string(b == 0 ? "[" : "(") + format_double(s.lo) + ", " + format_double(s.hi) + "]";
      out.strata.push_back(s);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double v = col.numbers[i];
      // First bin whose upper edge is >= v.
      auto it = std::lower_bound(edges.begin() + 1, edges.end(), v);
      if (it == edges.end()) --it;
      stratum_of[i] = static_cast<std::size_t>(it - edges.begin() - 1);
    }
  }

  std::vector<std::set<std::size_t>> schools(out.strata.size());
  std::vector<double> sums(out.strata.size(), 0.0);
  for (auto& s : out.strata) {
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < m; ++i) {
    Stratum& s = out.strata[stratum_of[i]];
    const double t = cate.tau_hat[i];
    ++s.n_students;
    sums[stratum_of[i]] += t;
    s.min = std::min(s.min, t);
    s.max = std::max(s.max, t);
    schools[stratum_of[i]].insert(dataset.school_of(i));
  }
  for (std::size_t b = 0; b < out.strata.size(); ++b) {
    Stratum& s = out.strata[b];
    s.n_schools = schools[b].size();
    if (s.n_students == 0) {
      s.mean = s.min = s.max = kNaN;
    } else {
      s.mean = sums[b] / static_cast<double>(s.n_students);
    }
  }
  return out;
}

// ---- interpretation trees ------------------------------------------------

LeafConstraints default_leaf_constraints(const Dataset& dataset,
                                         const std::vector<std::string>& covariates) {
  LeafConstraints c;
  c.min_schools = 10;
  c.min_students = 1;
  for (const auto& name : covariates) {
    const ColumnSpec* spec = find_spec(dataset.schema(), name);
    if (spec && spec->level == Level::kStudent) c.min_students = 1000;
  }
  return c;
}

Eigen::VectorXd InterpretTree::predict(const Dataset& data) const {
  return tree.predict(encoder.transform(data).values);
}

nlohmann::json InterpretTree::to_json() const {
  nlohmann::json leaves = nlohmann::json::array();
  const auto& nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_leaf()) continue;
    leaves.push_back({{"node", i},
                      {"mean_tau_hat", nodes[i].value},
                      {"n_students", nodes[i].n_rows},
                      {"n_schools", nodes[i].n_schools}});
  }
  return {{"covariates", covariates},
          {"feature_names", feature_names()},
          {"constraints", {{"min_schools", constraints.min_schools}, {"min_students", constraints.min_students}}},
          {"depth", tree.depth()},
          {"tree", tree.to_json()},
          {"leaves", leaves},
          {"rules", rules_to_json(export_rules(*this))}};
}

InterpretTree interpret_tree_fit(const CateTable& cate, const Dataset& dataset,
                                 const std::vector<std::string>& covariates,
                                 std::optional<LeafConstraints> constraints, std::size_t max_depth) {
  if (covariates.empty()) throw ArgumentError("interpret_tree_fit: covariate subset is empty");
  check_aligned(cate, dataset.num_rows(), "interpret_tree_fit");
  InterpretTree out;
  out.covariates = covariates;
  out.constraints = constraints ? *constraints : default_leaf_constraints(dataset, covariates);
  if (out.constraints.min_schools < 1 || out.constraints.min_students < 1) {
    throw ArgumentError("interpret_tree_fit: leaf constraints must be >= 1");
  }
  if (dataset.num_schools() < out.constraints.min_schools) {
    throw FitError("interpret_tree_fit: " + std::to_string(dataset.num_schools()) +
                   " schools cannot satisfy min_schools=" + std::to_string(out.constraints.min_schools));
  }
  if (dataset.num_rows() < out.constraints.min_students) {
    throw FitError("interpret_tree_fit: " + std::to_string(dataset.num_rows()) +
                   " students cannot satisfy min_students=" + std::to_string(out.constraints.min_students));
  }
  EncoderOptions opts;
  opts.standardize = false;
  opts.covariates = covariates;
  out.encoder = Encoder::fit(dataset, opts);
  const FeatureMatrix fm = out.encoder.transform(dataset);

  TreeParams params;
  params.max_depth = max_depth;
  params.min_leaf_rows = out.constraints.min_students;
  params.min_leaf_schools = out.constraints.min_schools;
  TreeFitInputs inputs;
  inputs.school_ids = dataset.schools();
  out.tree = tree_fit(fm.values, cate.tau_hat, params, inputs);
  return out;
}

bool Rule::matches(const double* x) const {
  for (const auto& c : conditions) {
    if (!c.holds(x)) return false;
  }
  return true;
}

std::string Rule::to_string() const {
  std::string s;
  if (conditions.empty()) {
    s = "always";
  } else {
    for (std::size_t i = 0; i < conditions.size(); ++i) {
      if (i) s += " and ";
      s += conditions[i].name + (conditions[i].less_equal ? " <= " : " > ") +
           format_double(conditions[i].threshold);
    }
  }
  return s + " => tau_hat = " + format_double(value) + " (students=" + std::to_string(n_students) +
         ", schools=" + std::to_string(n_schools) + ")";
}

std::vector<Rule> export_rules(const TreeModel& tree, const std::vector<std::string>& feature_names) {
  std::vector<Rule> rules;
  if (tree.nodes().empty()) return rules;
  std::vector<RuleCondition> path;
  collect_rules(tree, feature_names, 0, path, rules);
  return rules;
}

std::vector<Rule> export_rules(const InterpretTree& tree) { return export_rules(tree.tree, tree.feature_names()); }

nlohmann::json rules_to_json(const std::vector<Rule>& rules) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rules) {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : r.conditions) {
      conds.push_back({{"feature", c.name}, {"op", c.less_equal ? "<=" : ">"}, {"threshold", c.threshold}});
    }
    out.push_back({{"conditions", conds},
                   {"leaf", r.leaf},
                   {"mean_tau_hat", r.value},
                   {"n_students", r.n_students},
                   {"n_schools", r.n_schools}});
  }
  return out;
}

std::string rules_to_text(const std::vector<Rule>& rules) {
  std::string out;
  for (const auto& r : rules) out += r.to_string() + "\n";
  return out;
}

Eigen::VectorXd predict_rules(const std::vector<Rule>& rules, const Eigen::MatrixXd& X) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = X;
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double* x = rows.data() + i * X.cols();
    auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.matches(x); });
    if (it == rules.end()) throw ArgumentError("predict_rules: no rule matches row " + std::to_string(i));
    out(i) = it->value;
  }
  return out;
}

std::vector<PairGridCell> pair_grid(const InterpretTree& tree, const Dataset& dataset, std::size_t n) {
  if (tree.encoder.width() != 2) throw ArgumentError("pair_grid: tree must use exactly two numeric features");
  if (n < 2) throw ArgumentError("pair_grid: need at least 2 grid points per axis");
  const FeatureMatrix fm = tree.encoder.transform(dataset);
  const Eigen::Vector2d lo = fm.values.colwise().minCoeff();
  const Eigen::Vector2d hi = fm.values.colwise().maxCoeff();
  std::vector<PairGridCell> grid;
  grid.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double p[2] = {lo(0) + (hi(0) - lo(0)) * static_cast<double>(a) / static_cast<double>(n - 1),
                     lo(1) + (hi(1) - lo(1)) * static_cast<double>(b) / static_cast<double>(n - 1)};
      const std::size_t leaf = tree.tree.leaf_of(p);
      grid.push_back({p[0], p[1], leaf, tree.tree.nodes()[leaf].value});
    }
  }
  return grid;
}

void write_pair_grid_csv(const std::vector<PairGridCell>& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "x,y,leaf_id,leaf_mean\n";
  for (const auto& c : grid) {
    out << format_double(c.x) << ',' << format_double(c.y) << ',' << c.leaf << ',' << format_double(c.leaf_mean)
        << '\n';
  }
}

}  // namespace hetfx
