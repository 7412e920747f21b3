// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hetfx/cate_table.h"
#include "hetfx/dataset.h"
#include "hetfx/tlearner.h"
#include "json.hpp"

namespace hetfx {

// mean(y | z=1) - mean(y | z=0). ArgumentError when a group is empty.
double naive_ate(const Dataset& dataset);

// Mean of tau_hat. ArgumentError when empty.
double ate(const CateTable& cate);

// 1 - SSE / SST with each row scored by its own group's outcome model.
// MetricError when the outcomes have zero variance.
double r2_heldout(const OutcomePairModel& model, const Dataset& valid);
double factual_r2(std::span<const double> y, std::span<const int> z,
                  const Eigen::VectorXd& mu0, const Eigen::VectorXd& mu1);

// Type-7 (linear interpolation) sample quantile of sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

struct BootstrapResult {
  double point_estimate = 0.0;
  std::vector<double> replicates;  // successful replicates in replicate order
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::string method = "empirical";
  std::size_t requested = 0;  // B
  std::size_t failures = 0;

  nlohmann::json to_json() const;
};

// Empirical (basic) interval: [2*point - q(1 - a/2), 2*point - q(a/2)],
// a = 1 - level, quantiles over the replicates.
void set_empirical_interval(BootstrapResult& result);

// Replicate `replicate` of a school-level resample: n schools drawn with
// replacement from substream (seed, replicate); every row of a drawn school
// is copied and the copy is relabeled "<label>#<draw>" so repeated draws
// stay distinct clusters.
struct SchoolResample {
  std::vector<std::size_t> drawn_schools;  // original dense indices, draw order
  std::vector<std::size_t> rows;           // original row indices
  Dataset dataset;
};
SchoolResample resample_schools(const Dataset& dataset, std::uint64_t seed, std::size_t replicate);

using Statistic = std::function<double(const Dataset&)>;
using MultiStatistic = std::function<std::vector<double>(const Dataset&)>;

// Runs `statistic` on the full data (point estimate) and on B resamples in
// parallel. A replicate that throws counts as a failure; more than 20%
// failures raise AggregationError.
BootstrapResult cluster_bootstrap(const Dataset& dataset, const Statistic& statistic, std::size_t B,
                                  double level, std::uint64_t seed);

// Several statistics sharing the same resamples. `statistic` must return
// the same number of values every time; a replicate fails as a whole.
std::vector<BootstrapResult> cluster_bootstrap_multi(const Dataset& dataset,
                                                     const MultiStatistic& statistic,
                                                     std::size_t B, double level,
                                                     std::uint64_t seed);

// Same as above with the point estimates supplied; the statistic receives
// the resample and its replicate id (1..B).
using ReplicateStatistic = std::function<std::vector<double>(const SchoolResample&, std::size_t)>;
std::vector<BootstrapResult> cluster_bootstrap_replicates(const Dataset& dataset,
                                                          const std::vector<double>& point_estimates,
                                                          const ReplicateStatistic& statistic,
                                                          std::size_t B, double level,
                                                          std::uint64_t seed);

}  // namespace hetfx
