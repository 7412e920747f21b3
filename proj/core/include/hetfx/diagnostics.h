// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hetfx/dataset.h"
#include "json.hpp"

namespace hetfx {

// Standardized mean difference (mean1 - mean0) / sqrt((v0 + v1) / 2) with
// population group variances; 0 when the pooled stddev is 0. `feature` is
// a numeric covariate or a category indicator "<column>=<category>".
double smd(const Dataset& dataset, const std::string& feature);

struct CovariateMarginal {
  std::string covariate;
  Kind kind = Kind::kNumeric;
  std::vector<double> edges;            // numeric: n_bins + 1 shared edges (2 for constants)
  std::vector<std::string> categories;  // categorical
  std::vector<std::size_t> counts0;     // per bin / category, z = 0
  std::vector<std::size_t> counts1;     // z = 1
};

// Per-covariate histograms on bins shared by both groups: uniform width over
// the pooled range for numeric columns, one bin per category otherwise.
std::vector<CovariateMarginal> covariate_marginals(const Dataset& dataset, std::size_t n_bins = 20);

struct GroupMmd {
  double mmd2 = 0.0;
  double sigma = 0.0;
  std::size_t points0 = 0;  // rows used per group
  std::size_t points1 = 0;
};

// mmd2 between the standardized encoded covariates of the two groups. Groups
// larger than `max_points` are thinned at a fixed stride; sigma <= 0 selects
// the median pairwise distance of the pooled points.
GroupMmd group_mmd(const Dataset& dataset, double sigma = 0.0, std::size_t max_points = 2000);

struct Projection {
  Eigen::MatrixXd coordinates;  // m x 2
  Eigen::MatrixXd loadings;     // d x 2
  Eigen::Vector2d variances;    // eigenvalues, descending
  std::vector<std::string> feature_names;
};

// Principal-component projection of the standardized encoded covariates.
// Each component's first nonzero loading is positive. ArgumentError with
// fewer than two encoded columns.
Projection pca_project(const Dataset& dataset);
Projection pca_project(const Eigen::MatrixXd& X);

struct BalanceReport {
  std::vector<std::pair<std::string, double>> smd;  // encoded feature order
  std::vector<CovariateMarginal> marginals;
  GroupMmd mmd;
  Projection projection;
  std::vector<int> treatments;

  nlohmann::json to_json() const;
};

BalanceReport balance_report(const Dataset& dataset, std::size_t n_bins = 20);

// balance.json, marginal_<covariate>.csv and projection.csv under `dir`.
// Returns the relative file names written.
std::vector<std::string> write_balance_report(const BalanceReport& report,
                                              const std::filesystem::path& dir);

}  // namespace hetfx
