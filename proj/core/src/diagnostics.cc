// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "hetfx/encoding.h"
#include "hetfx/errors.h"
#include "hetfx/mmd.h"

namespace hetfx {
namespace {

std::vector<double> feature_values(const Dataset& dataset, const std::string& feature) {
  const Schema& schema = dataset.schema();
  auto resolve = [&](const std::string& name) -> const ColumnSpec* {
    const auto idx = schema.find(name);
    if (!idx || schema.column(*idx).role != Role::kCovariate) return nullptr;
    return &schema.column(*idx);
  };
  if (const ColumnSpec* spec = resolve(feature); spec && spec->kind == Kind::kNumeric) {
    return dataset.column(feature).numbers;
  }
  const auto eq = feature.find('=');
  if (eq != std::string::npos) {
    const std::string name = feature.substr(0, eq);
    const std::string category = feature.substr(eq + 1);
    if (const ColumnSpec* spec = resolve(name); spec && spec->kind == Kind::kCategorical) {
      const auto& labels = dataset.column(name).labels;
      std::vector<double> out(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == category ? 1.0 : 0.0;
      return out;
    }
  }
  throw ArgumentError("unknown covariate '" + feature + "'");
}

void write_or_throw(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
}

Eigen::MatrixXd thin(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows, std::size_t max_points) {
  const std::size_t k = std::min(rows.size(), max_points);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(k), X.cols());
  for (std::size_t i = 0; i < k; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i * rows.size() / k]));
  }
  return out;
}

}  // namespace

double smd(const Dataset& dataset, const std::string& feature) {
  const std::vector<double> v = feature_values(dataset, feature);
  double sum[2] = {0, 0}, sq[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int z = dataset.treatment(i);
    sum[z] += v[i];
    ++n[z];
  }
  if (n[0] == 0 || n[1] == 0) throw ArgumentError("smd: both treatment groups must be non-empty");
  const double mean[2] = {sum[0] / static_cast<double>(n[0]), sum[1] / static_cast<double>(n[1])};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int z = dataset.treatment(i);
    sq[z] += (v[i] - mean[z]) * (v[i] - mean[z]);
  }
  const double pooled = std::sqrt((sq[0] / static_cast<double>(n[0]) + sq[1] / static_cast<double>(n[1])) / 2.0);
  if (!(pooled > 0.0)) return 0.0;
  return (mean[1] - mean[0]) / pooled;
}

std::vector<CovariateMarginal> covariate_marginals(const Dataset& dataset, std::size_t n_bins) {
  if (n_bins < 1) throw ArgumentError("covariate_marginals: n_bins must be >= 1");
  const Schema& schema = dataset.schema();
  std::vector<CovariateMarginal> out;
  for (std::size_t c : schema.covariates()) {
    const ColumnSpec& spec = schema.column(c);
    const Column& col = dataset.column(c);
    CovariateMarginal mg;
    mg.covariate = spec.name;
    mg.kind = spec.kind;
    std::vector<std::size_t> bin(dataset.num_rows());
    if (spec.kind == Kind::kCategorical) {
      const std::set<std::string> cats(col.labels.begin(), col.labels.end());
      mg.categories.assign(cats.begin(), cats.end());
      for (std::size_t i = 0; i < bin.size(); ++i) {
        bin[i] = static_cast<std::size_t>(
            std::lower_bound(mg.categories.begin(), mg.categories.end(), col.labels[i]) - mg.categories.begin());
      }
    } else {
      const auto [lo_it, hi_it] = std::minmax_element(col.numbers.begin(), col.numbers.end());
      const double lo = *lo_it, hi = *hi_it;
      const std::size_t k = hi > lo ? n_bins : 1;
      for (std::size_t e = 0; e <= k; ++e) {
        mg.edges.push_back(e == k ? hi : lo + (hi - lo) * static_cast<double>(e) / static_cast<double>(k));
      }
      for (std::size_t i = 0; i < bin.size(); ++i) {
        const double t = hi > lo ? (col.numbers[i] - lo) / (hi - lo) : 0.0;
        bin[i] = std::min(k - 1, static_cast<std::size_t>(std::floor(t * static_cast<double>(k))));
      }
    }
    const std::size_t width = spec.kind == Kind::kCategorical ? mg.categories.size() : mg.edges.size() - 1;
    mg.counts0.assign(width, 0);
    mg.counts1.assign(width, 0);
    for (std::size_t i = 0; i < bin.size(); ++i) {
      ++(dataset.treatment(i) == 1 ? mg.counts1 : mg.counts0)[bin[i]];
    }
    out.push_back(std::move(mg));
  }
  return out;
}

GroupMmd group_mmd(const Dataset& dataset, double sigma, std::size_t max_points) {
  const auto rows0 = dataset.group_rows(0);
  const auto rows1 = dataset.group_rows(1);
  if (rows0.empty() || rows1.empty()) throw ArgumentError("group_mmd: both treatment groups must be non-empty");
  if (max_points < 1) throw ArgumentError("group_mmd: max_points must be >= 1");
  const FeatureMatrix fm = Encoder::fit(dataset).transform(dataset);
  GroupMmd out;
  const Eigen::MatrixXd A = thin(fm.values, rows0, max_points);
  const Eigen::MatrixXd B = thin(fm.values, rows1, max_points);
  out.points0 = static_cast<std::size_t>(A.rows());
  out.points1 = static_cast<std::size_t>(B.rows());
  if (sigma > 0.0) {
    out.sigma = sigma;
  } else {
    Eigen::MatrixXd pooled(A.rows() + B.rows(), A.cols());
    pooled << A, B;
    out.sigma = median_pairwise_distance(pooled);
  }
  out.mmd2 = mmd2_rbf(A, B, out.sigma);
  return out;
}

Projection pca_project(const Eigen::MatrixXd& X) {
  if (X.cols() < 2) throw ArgumentError("pca_project: need at least two encoded columns");
  if (X.rows() < 1) throw ArgumentError("pca_project: empty input");
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mean;
  const Eigen::MatrixXd cov = (Xc.transpose() * Xc) / static_cast<double>(X.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index d = X.cols();
  Projection p;
  p.loadings.resize(d, 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    p.loadings.col(k) = v;
    p.variances(k) = std::max(0.0, solver.eigenvalues()(d - 1 - k));
  }
  p.coordinates = Xc * p.loadings;
  return p;
}

Projection pca_project(const Dataset& dataset) {
  const FeatureMatrix fm = Encoder::fit(dataset).transform(dataset);
  Projection p = pca_project(fm.values);
  p.feature_names = fm.feature_names;
  return p;
}

BalanceReport balance_report(const Dataset& dataset, std::size_t n_bins) {
  BalanceReport r;
  const Encoder enc = Encoder::fit(dataset);
  for (const auto& name : enc.feature_names()) r.smd.emplace_back(name, smd(dataset, name));
  r.marginals = covariate_marginals(dataset, n_bins);
  r.mmd = group_mmd(dataset);
  r.projection = pca_project(dataset);
  r.treatments.assign(dataset.treatments().begin(), dataset.treatments().end());
  return r;
}

nlohmann::json BalanceReport::to_json() const {
  nlohmann::json smd_j = nlohmann::json::array();
  for (const auto& [name, value] : smd) smd_j.push_back({{"feature", name}, {"smd", value}});
  nlohmann::json marg = nlohmann::json::array();
  for (const auto& mg : marginals) {
    nlohmann::json m = {{"covariate", mg.covariate},
                        {"kind", hetfx::to_string(mg.kind)},
                        {"counts_z0", mg.counts0},
                        {"counts_z1", mg.counts1}};
    if (mg.kind == Kind::kNumeric) {
      m["edges"] = mg.edges;
    } else {
      m["categories"] = mg.categories;
    }
    marg.push_back(std::move(m));
  }
  return {{"smd", smd_j},
          {"marginals", marg},
          {"mmd", {{"mmd2", mmd.mmd2}, {"sigma", mmd.sigma}, {"points_z0", mmd.points0}, {"points_z1", mmd.points1}}},
          {"projection",
           {{"method", "principal components"},
            {"variances", {projection.variances(0), projection.variances(1)}},
            {"feature_names", projection.feature_names}}}};
}

std::vector<std::string> write_balance_report(const BalanceReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  write_or_throw(dir / "balance.json", report.to_json().dump(2) + "\n");
  files.push_back("balance.json");
  for (const auto& mg : report.marginals) {
    std::string csv = mg.kind == Kind::kNumeric ? "bin_lo,bin_hi,count_z0,count_z1\n" : "category,count_z0,count_z1\n";
    for (std::size_t b = 0; b < mg.counts0.size(); ++b) {
      if (mg.kind == Kind::kNumeric) {
        csv += format_double(mg.edges[b]) + "," + format_double(mg.edges[b + 1]) + ",";
      } else {
        csv += mg.categories[b] + ",";
      }
      csv += std::to_string(mg.counts0[b]) + "," + std::to_string(mg.counts1[b]) + "\n";
    }
    const std::string name = "marginal_" + mg.covariate + ".csv";
    write_or_throw(dir / name, csv);
    files.push_back(name);
  }
  std::string proj = "x,y,z\n";
  for (Eigen::Index i = 0; i < report.projection.coordinates.rows(); ++i) {
    proj += format_double(report.projection.coordinates(i, 0)) + "," +
            format_double(report.projection.coordinates(i, 1)) + "," +
            std::to_string(report.treatments[static_cast<std::size_t>(i)]) + "\n";
  }
  write_or_throw(dir / "projection.csv", proj);
  files.push_back("projection.csv");
  return files;
}

}  // namespace hetfx
