// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/inference.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

#include "hetfx/errors.h"
#include "hetfx/parallel.h"
#include "hetfx/random.h"

namespace hetfx {

double naive_ate(const Dataset& dataset) {
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < dataset.num_rows(); ++i) {
    const int z = dataset.treatment(i);
    sum[z] += dataset.outcome(i);
    ++count[z];
  }
  if (count[0] == 0) throw ArgumentError("naive_ate: control group (z=0) is empty");
  if (count[1] == 0) throw ArgumentError("naive_ate: treated group (z=1) is empty");
  return sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
}

double ate(const CateTable& cate) {
  if (cate.tau_hat.empty()) throw ArgumentError("ate: empty CATE table");
  double s = 0.0;
  for (double t : cate.tau_hat) s += t;
  return s / static_cast<double>(cate.tau_hat.size());
}

double factual_r2(std::span<const double> y, std::span<const int> z, const Eigen::VectorXd& mu0,
                  const Eigen::VectorXd& mu1) {
  const std::size_t m = y.size();
  if (m == 0) throw MetricError("r2: empty validation set");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(m);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double f = z[i] == 1 ? mu1(k) : mu0(k);
    sse += (y[i] - f) * (y[i] - f);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  if (!(sst > 0.0)) throw MetricError("r2 is undefined: validation outcomes have zero variance");
  return 1.0 - sse / sst;
}

double r2_heldout(const OutcomePairModel& model, const Dataset& valid) {
  const auto [mu0, mu1] = model.predict_pair(valid);
  return factual_r2(valid.outcomes(), valid.treatments(), mu0, mu1);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

nlohmann::json BootstrapResult::to_json() const {
  return {{"point_estimate", point_estimate}, {"ci_low", ci_low},   {"ci_high", ci_high},
          {"level", level},                   {"method", method},   {"B", requested},
          {"failures", failures},             {"replicates", replicates}};
}

void set_empirical_interval(BootstrapResult& r) {
  std::vector<double> sorted = r.replicates;
  std::sort(sorted.begin(), sorted.end());
  const double a = 1.0 - r.level;
  const double q_lo = quantile_sorted(sorted, a / 2.0);
  const double q_hi = quantile_sorted(sorted, 1.0 - a / 2.0);
  r.ci_low = 2.0 * r.point_estimate - q_hi;
  r.ci_high = 2.0 * r.point_estimate - q_lo;
}

SchoolResample resample_schools(const Dataset& dataset, std::uint64_t seed, std::size_t replicate) {
  const std::size_t n = dataset.num_schools();
  Engine engine = make_engine(seed, replicate);
  SchoolResample out;
  out.drawn_schools.resize(n);
  for (auto& s : out.drawn_schools) s = uniform_index(engine, n);
  std::vector<std::string> labels;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t s = out.drawn_schools[d];
    const std::string label = dataset.school_label(s) + "#" + std::to_string(d);
    for (std::size_t row : dataset.rows_of_school(s)) {
      out.rows.push_back(row);
      labels.push_back(label);
    }
  }
  out.dataset = dataset.select_rows(out.rows).with_school_labels(std::move(labels));
  return out;
}

std::vector<BootstrapResult> cluster_bootstrap_replicates(const Dataset& dataset,
                                                          const std::vector<double>& point_estimates,
                                                          const ReplicateStatistic& statistic,
                                                          std::size_t B, double level,
                                                          std::uint64_t seed) {
  if (B < 1) throw ArgumentError("bootstrap: B must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("bootstrap: level must be in (0, 1)");
  std::vector<std::optional<std::vector<double>>> values(B);
  parallel_for(B, [&](std::size_t k) {
    try {
      auto v = statistic(resample_schools(dataset, seed, k + 1), k + 1);
      if (v.size() != point_estimates.size()) throw ArgumentError("bootstrap: statistic arity changed");
      for (double x : v) {
        if (!std::isfinite(x)) throw MetricError("bootstrap: non-finite statistic");
      }
      values[k] = std::move(v);
    } catch (const ArgumentError&) {
      throw;
    } catch (const std::exception&) {
      values[k].reset();
    }
  });
  std::size_t failures = 0;
  for (const auto& v : values) failures += v ? 0 : 1;
  if (static_cast<double>(failures) > 0.2 * static_cast<double>(B)) {
    throw AggregationError("bootstrap: " + std::to_string(failures) + " of " + std::to_string(B) +
                           " replicates failed");
  }
  std::vector<BootstrapResult> results(point_estimates.size());
  for (std::size_t s = 0; s < results.size(); ++s) {
    auto& r = results[s];
    r.point_estimate = point_estimates[s];
    r.level = level;
    r.requested = B;
    r.failures = failures;
    for (const auto& v : values) {
      if (v) r.replicates.push_back((*v)[s]);
    }
    set_empirical_interval(r);
  }
  return results;
}

std::vector<BootstrapResult> cluster_bootstrap_multi(const Dataset& dataset,
                                                     const MultiStatistic& statistic,
                                                     std::size_t B, double level,
                                                     std::uint64_t seed) {
  const std::vector<double> point = statistic(dataset);
  return cluster_bootstrap_replicates(
      dataset, point, [&](const SchoolResample& r, std::size_t) { return statistic(r.dataset); }, B, level,
      seed);
}

BootstrapResult cluster_bootstrap(const Dataset& dataset, const Statistic& statistic, std::size_t B,
                                  double level, std::uint64_t seed) {
  auto results = cluster_bootstrap_multi(
      dataset, [&](const Dataset& d) { return std::vector<double>{statistic(d)}; }, B, level, seed);
  return results.front();
}

}  // namespace hetfx
