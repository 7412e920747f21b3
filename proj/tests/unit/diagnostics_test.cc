// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "hetfx/diagnostics.h"
#include "hetfx/encoding.h"
#include "hetfx/errors.h"
#include "hetfx/mmd.h"
#include "hetfx/synthetic.h"
#include "test_support.h"

namespace hetfx {
namespace {

using testing::TableBuilder;

Dataset synthetic(std::size_t schools, std::size_t per_school, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_schools = schools;
  cfg.students_per_school = per_school;
  cfg.seed = seed;
  return generate_synthetic(cfg).dataset;
}

Dataset flip_labels(const Dataset& d) {
  std::vector<int> z(d.treatments().begin(), d.treatments().end());
  for (int& v : z) v = 1 - v;
  return d.with_treatments(z);
}

// ---- smd -------------------------------------------------------------------------

TEST(Smd, IdenticalGroupsGiveZero) {
  const Dataset d = TableBuilder({"a", "a", "b", "b"}, {0, 1, 0, 1}, {0, 0, 0, 0})
                        .numeric("x", {1, 1, 3, 3})
                        .build();
  EXPECT_EQ(smd(d, "x"), 0.0);
}

TEST(Smd, UnitMeanShiftWithUnitSpread) {
  // z=0: {-1, 1} mean 0 sd 1; z=1: {0, 2} mean 1 sd 1 (population)
  const Dataset d = TableBuilder({"a", "a", "b", "b"}, {0, 0, 1, 1}, {0, 0, 0, 0})
                        .numeric("x", {-1, 1, 0, 2})
                        .build();
  EXPECT_DOUBLE_EQ(smd(d, "x"), 1.0);
}

TEST(Smd, ZeroSpreadGivesZero) {
  const Dataset d = TableBuilder({"a", "b"}, {0, 1}, {0, 0}).numeric("x", {1, 2}).build();
  EXPECT_EQ(smd(d, "x"), 0.0);
}

TEST(Smd, CategoryIndicator) {
  const Dataset d = TableBuilder({"a", "b", "c", "d"}, {0, 0, 1, 1}, {0, 0, 0, 0})
                        .categorical("k", {"u", "v", "u", "u"})
                        .build();
  // indicator k=u: z0 {1,0} mean .5 var .25; z1 {1,1} mean 1 var 0
  EXPECT_NEAR(smd(d, "k=u"), 0.5 / std::sqrt(0.125), 1e-12);
}

TEST(Smd, RandomizedTreatmentIsBalanced) {
  const Dataset d = synthetic(72, 140, 1);
  ASSERT_GE(d.num_rows(), 10000u);
  const Encoder enc = Encoder::fit(d);
  for (const auto& name : enc.feature_names()) EXPECT_LT(std::abs(smd(d, name)), 0.1) << name;
}

TEST(Smd, SignFlipsUnderLabelSwap) {
  const Dataset d = synthetic(20, 10, 2);
  const Dataset f = flip_labels(d);
  for (const std::string name : {"X1", "S3", "XC=B"}) EXPECT_NEAR(smd(f, name), -smd(d, name), 1e-12);
}

TEST(Smd, Errors) {
  const Dataset d = synthetic(3, 4, 3);
  EXPECT_THROW(smd(d, "missing"), ArgumentError);
  const Dataset one = TableBuilder({"a", "b"}, {1, 1}, {0, 0}).numeric("x", {1, 2}).build();
  EXPECT_THROW(smd(one, "x"), ArgumentError);
}

// ---- marginals -------------------------------------------------------------------

TEST(Marginals, ConstantCovariateOccupiesOneBin) {
  const Dataset d = TableBuilder({"a", "a", "b"}, {0, 1, 1}, {0, 0, 0}).numeric("x", {4, 4, 4}).build();
  const auto m = covariate_marginals(d, 20);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].counts0, std::vector<std::size_t>({1}));
  EXPECT_EQ(m[0].counts1, std::vector<std::size_t>({2}));
}

TEST(Marginals, CountsConserveGroupSizes) {
  const Dataset d = synthetic(15, 20, 4);
  const std::size_t n0 = d.group_rows(0).size(), n1 = d.group_rows(1).size();
  for (const auto& m : covariate_marginals(d, 7)) {
    EXPECT_EQ(std::accumulate(m.counts0.begin(), m.counts0.end(), std::size_t{0}), n0) << m.covariate;
    EXPECT_EQ(std::accumulate(m.counts1.begin(), m.counts1.end(), std::size_t{0}), n1) << m.covariate;
    if (m.kind == Kind::kNumeric) {
      EXPECT_EQ(m.counts0.size() + 1, m.edges.size());
    } else {
      EXPECT_EQ(m.categories.size(), m.counts0.size());
    }
  }
}

TEST(Marginals, RandomizedUniformCovariateHasEqualGroupShares) {
  const std::size_t m = 10000;
  std::mt19937_64 e(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(m);
  std::vector<int> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = u(e);
    z[i] = coin(e);
  }
  const Dataset d = TableBuilder(testing::school_labels(m, 50), z, std::vector<double>(m, 0.0))
                        .numeric("x", x)
                        .build();
  const auto margins = covariate_marginals(d, 20);
  const double share = static_cast<double>(d.group_rows(1).size()) / static_cast<double>(m);
  for (std::size_t b = 0; b < margins[0].counts0.size(); ++b) {
    const double n = static_cast<double>(margins[0].counts0[b] + margins[0].counts1[b]);
    const double p = static_cast<double>(margins[0].counts1[b]) / n;
    EXPECT_LT(std::abs(p - share), 3.0 * std::sqrt(share * (1 - share) / n)) << "bin " << b;
  }
}

// ---- group mmd -------------------------------------------------------------------

TEST(GroupMmd, IndependentAssignmentBelowPermutationQuantile) {
  const Dataset d = synthetic(30, 10, 6);
  const GroupMmd g = group_mmd(d);
  const FeatureMatrix fm = Encoder::fit(d).transform(d);
  const auto rows0 = d.group_rows(0), rows1 = d.group_rows(1);
  Eigen::MatrixXd A(rows0.size(), fm.cols()), B(rows1.size(), fm.cols());
  for (std::size_t i = 0; i < rows0.size(); ++i) A.row(i) = fm.values.row(rows0[i]);
  for (std::size_t i = 0; i < rows1.size(); ++i) B.row(i) = fm.values.row(rows1[i]);
  // delegation consistency
  EXPECT_NEAR(g.mmd2, mmd2_rbf(A, B, g.sigma), 1e-15);
  const auto test = mmd_permutation_test(A, B, g.sigma, 200, 7);
  EXPECT_LT(g.mmd2, test.null_quantile(0.95));
}

TEST(GroupMmd, DisjointFarSupportsNearTwo) {
  const std::size_t m = 40;
  std::vector<double> x(m);
  std::vector<int> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    z[i] = i < m / 2 ? 0 : 1;
    x[i] = (z[i] ? 1000.0 : 0.0) + 0.001 * static_cast<double>(i % 5);
  }
  const Dataset d = TableBuilder(testing::school_labels(m, 4), z, std::vector<double>(m, 0.0))
                        .numeric("x", x)
                        .build();
  EXPECT_NEAR(group_mmd(d, 0.01).mmd2, 2.0, 1e-5);
}

TEST(GroupMmd, SymmetricUnderLabelSwap) {
  const Dataset d = synthetic(10, 10, 8);
  EXPECT_NEAR(group_mmd(d).mmd2, group_mmd(flip_labels(d)).mmd2, 1e-12);
}

// ---- projection ------------------------------------------------------------------

TEST(Projection, LineDataHasZeroSecondCoordinate) {
  Eigen::MatrixXd X(30, 3);
  for (int i = 0; i < 30; ++i) X.row(i) << i, 2.0 * i - 1.0, -0.5 * i;
  const Projection p = pca_project(X);
  EXPECT_LT(p.coordinates.col(1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GT(p.loadings(0, 0), 0.0);
}

TEST(Projection, CenteredAndOrderedBySpread) {
  const Dataset d = synthetic(20, 10, 9);
  const Projection p = pca_project(d);
  EXPECT_LT(std::abs(p.coordinates.col(0).mean()), 1e-9);
  EXPECT_LT(std::abs(p.coordinates.col(1).mean()), 1e-9);
  const auto var = [](const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().mean(); };
  EXPECT_GE(var(p.coordinates.col(0)), var(p.coordinates.col(1)));
  EXPECT_GE(p.variances(0), p.variances(1));
  // sign convention
  for (int k = 0; k < 2; ++k) {
    for (Eigen::Index i = 0; i < p.loadings.rows(); ++i) {
      if (std::abs(p.loadings(i, k)) > 1e-12) {
        EXPECT_GT(p.loadings(i, k), 0.0);
        break;
      }
    }
  }
  EXPECT_EQ(pca_project(d).coordinates, p.coordinates);
}

TEST(Projection, NeedsTwoColumns) {
  EXPECT_THROW(pca_project(Eigen::MatrixXd::Ones(5, 1)), ArgumentError);
}

// ---- report ----------------------------------------------------------------------

TEST(BalanceReport, WritesFilesThatParse) {
  const Dataset d = synthetic(8, 10, 10);
  const BalanceReport r = balance_report(d, 5);
  const auto dir = std::filesystem::temp_directory_path() / "hetfx_balance_test";
  std::filesystem::remove_all(dir);
  const auto files = write_balance_report(r, dir);
  EXPECT_FALSE(files.empty());
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream in(dir / "balance.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j.contains("mmd"));
  std::ifstream proj(dir / "projection.csv");
  std::string header;
  std::getline(proj, header);
  EXPECT_EQ(header, "x,y,z");
  std::size_t lines = 0;
  for (std::string line; std::getline(proj, line);) ++lines;
  EXPECT_EQ(lines, d.num_rows());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace hetfx
