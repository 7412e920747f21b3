// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <gtest/gtest.h>

#include <cmath>

#include "hetfx/errors.h"
#include "hetfx/inference.h"
#include "hetfx/mmd.h"
#include "hetfx/random.h"
#include "hetfx/repnet.h"
#include "hetfx/synthetic.h"
#include "hetfx/tlearner.h"

namespace hetfx {
namespace {

Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index d, Engine& e, double shift = 0.0) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = g(e) + shift;
  }
  return X;
}

RepNetConfig small_config(double alpha, std::uint64_t seed = 3) {
  RepNetConfig c;
  c.rep_layers = {12, 8};
  c.head_layers = {6};
  c.alpha = alpha;
  c.epochs = 6;
  c.batch_size = 32;
  c.seed = seed;
  c.optimizer.learning_rate = 5e-3;
  return c;
}

Dataset small_dataset(std::uint64_t seed, bool imbalanced = false) {
  SyntheticConfig cfg;
  cfg.n_schools = 12;
  cfg.students_per_school = 40;
  cfg.seed = seed;
  if (imbalanced) {
    cfg.propensity.kind = PropensitySpec::Kind::kLogistic;
    cfg.propensity.coefficients = {{"X1", 1.5}, {"S3", 0.4}};
    cfg.propensity.intercept = -1.6;
  }
  return generate_synthetic(cfg).dataset;
}

// ---- mmd -----------------------------------------------------------------

TEST(Mmd, IdenticalSetsGiveZero) {
  Engine e(1);
  const Eigen::MatrixXd A = random_points(30, 3, e);
  EXPECT_LT(std::abs(mmd2_rbf(A, A, 1.3)), 1e-12);
}

TEST(Mmd, SingletonHandValue) {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Ones(1, 1);
  EXPECT_NEAR(mmd2_rbf(A, B, 1.0), 2.0 - 2.0 * std::exp(-0.5), 1e-12);
}

TEST(Mmd, SymmetricAndNonNegativeOnRandomSets) {
  Engine e(2);
  for (int k = 0; k < 50; ++k) {
    const Eigen::MatrixXd A = random_points(1 + k % 7, 2, e);
    const Eigen::MatrixXd B = random_points(1 + k % 5, 2, e, 0.3);
    const double ab = mmd2_rbf(A, B, 0.8), ba = mmd2_rbf(B, A, 0.8);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, ba, 1e-12);
  }
}

TEST(Mmd, FarApartSetsApproachTwo) {
  Engine e(3);
  const Eigen::MatrixXd A = random_points(20, 2, e) * 0.01;
  const Eigen::MatrixXd B = (random_points(20, 2, e) * 0.01).array() + 100.0;
  EXPECT_NEAR(mmd2_rbf(A, B, 1.0), 2.0, 1e-3);
}

TEST(Mmd, ErrorsOnEmptyOrBadBandwidth) {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(mmd2_rbf(Eigen::MatrixXd(0, 2), A, 1.0), ArgumentError);
  EXPECT_THROW(mmd2_rbf(A, A, 0.0), ArgumentError);
  EXPECT_THROW(mmd2_rbf(A, Eigen::MatrixXd::Zero(2, 3), 1.0), ArgumentError);
}

TEST(Mmd, GradientMatchesFiniteDifferences) {
  Engine e(4);
  const Eigen::MatrixXd A = random_points(6, 3, e);
  const Eigen::MatrixXd B = random_points(4, 3, e, 0.5);
  Eigen::MatrixXd gA, gB;
  mmd2_rbf_grad(A, B, 1.1, &gA, &gB);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      Eigen::MatrixXd up = A, down = A;
      up(i, j) += h;
      down(i, j) -= h;
      const double fd = (mmd2_rbf_grad(up, B, 1.1, nullptr, nullptr) - mmd2_rbf_grad(down, B, 1.1, nullptr, nullptr)) / (2 * h);
      EXPECT_NEAR(fd, gA(i, j), 1e-7);
    }
  }
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    Eigen::MatrixXd up = B, down = B;
    up(1, j) += h;
    down(1, j) -= h;
    const double fd = (mmd2_rbf_grad(A, up, 1.1, nullptr, nullptr) - mmd2_rbf_grad(A, down, 1.1, nullptr, nullptr)) / (2 * h);
    EXPECT_NEAR(fd, gB(1, j), 1e-7);
  }
}

TEST(Mmd, PermutationTestIsDeterministic) {
  Engine e(5);
  const Eigen::MatrixXd A = random_points(15, 2, e);
  const Eigen::MatrixXd B = random_points(15, 2, e, 2.0);
  const auto a = mmd_permutation_test(A, B, 1.0, 100, 9);
  const auto b = mmd_permutation_test(A, B, 1.0, 100, 9);
  EXPECT_EQ(a.null_values, b.null_values);
  EXPECT_LT(a.p_value, 0.05);
}

// ---- network ---------------------------------------------------------------

TEST(RepNet, ObjectiveGradientIncludingMmdMatchesFiniteDifferences) {
  Engine e(6);
  const Eigen::MatrixXd X = random_points(24, 4, e);
  std::vector<double> y(24);
  std::vector<int> z(24);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < 24; ++i) {
    z[i] = static_cast<int>(i % 3 == 0);
    y[i] = X(static_cast<Eigen::Index>(i), 0) + 0.5 * z[i] + 0.1 * g(e);
  }
  RepNetConfig cfg = small_config(2.0);
  cfg.activation = Activation::kTanh;
  const RepNetArchitecture arch(4, cfg);
  Eigen::VectorXd params(static_cast<Eigen::Index>(arch.num_params()));
  Engine init(1);
  arch.rep.initialize(params.data(), init);
  arch.head0.initialize(params.data() + arch.head0_offset(), init);
  arch.head1.initialize(params.data() + arch.head1_offset(), init);
  params.array() += 0.05;  // non-zero biases

  Eigen::VectorXd grad;
  const RepNetLoss loss = repnet_objective(arch, params, X, y, z, 2.0, 0.9, 1e-2, &grad);
  EXPECT_GT(loss.mmd, 0.0);
  Engine pick(2);
  for (int k = 0; k < 15; ++k) {
    const auto idx = static_cast<Eigen::Index>(uniform_index(pick, arch.num_params()));
    const double h = 1e-6;
    Eigen::VectorXd up = params, down = params;
    up(idx) += h;
    down(idx) -= h;
    const double fd = (repnet_objective(arch, up, X, y, z, 2.0, 0.9, 1e-2, nullptr).total -
                       repnet_objective(arch, down, X, y, z, 2.0, 0.9, 1e-2, nullptr).total) / (2 * h);
    EXPECT_LT(std::abs(fd - grad(idx)) / std::max(1e-8, std::abs(fd) + std::abs(grad(idx))), 1e-4)
        << "parameter " << idx;
  }
}

TEST(RepNet, AlphaZeroIsTarnet) {
  const Dataset d = small_dataset(1);
  const RepNetModel a = repnet_fit(d, small_config(0.0, 8));
  RepNetConfig tarnet = small_config(0.0, 8);
  tarnet.mmd_sigma = 0.0;
  const RepNetModel b = repnet_fit(d, tarnet);
  EXPECT_EQ((a.params - b.params).cwiseAbs().maxCoeff(), 0.0);
  const auto pa = repnet_predict_pair(a, d), pb = repnet_predict_pair(b, d);
  EXPECT_EQ(pa, pb);
}

TEST(RepNet, BiasOnlyHeadsGiveBiasDifference) {
  const Dataset d = small_dataset(2);
  RepNetModel m = repnet_fit(d, small_config(0.0));
  // Zero every head parameter except the output biases.
  const Eigen::Index h0 = static_cast<Eigen::Index>(m.arch.head0_offset());
  const Eigen::Index h1 = static_cast<Eigen::Index>(m.arch.head1_offset());
  const Eigen::Index hn = static_cast<Eigen::Index>(m.arch.head0.num_params());
  m.params.segment(h0, hn).setZero();
  m.params.segment(h1, hn).setZero();
  m.params(h0 + hn - 1) = 0.2;
  m.params(h1 + hn - 1) = 0.7;
  const auto pair = make_repnet_pair(m, "bias", 0);
  for (double t : impute_cate(pair, d).tau_hat) EXPECT_NEAR(t, 0.5, 1e-12);
}

TEST(RepNet, IdenticalHeadsGiveZeroEffect) {
  const Dataset d = small_dataset(3);
  RepNetModel m = repnet_fit(d, small_config(1.0));
  const Eigen::Index n = static_cast<Eigen::Index>(m.arch.head0.num_params());
  m.params.segment(static_cast<Eigen::Index>(m.arch.head1_offset()), n) =
      m.params.segment(static_cast<Eigen::Index>(m.arch.head0_offset()), n);
  for (double t : impute_cate(make_repnet_pair(m, "same", 0), d).tau_hat) EXPECT_EQ(t, 0.0);
}

TEST(RepNet, OutputsAndTraceAreFinite) {
  const Dataset d = small_dataset(4, true);
  const RepNetModel m = repnet_fit(d, small_config(1.0));
  ASSERT_EQ(m.trace.size(), 6u);
  for (const auto& t : m.trace) {
    EXPECT_TRUE(std::isfinite(t.factual));
    EXPECT_TRUE(std::isfinite(t.mmd));
  }
  const auto [mu0, mu1] = repnet_predict_pair(m, d);
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    EXPECT_TRUE(std::isfinite(mu0[i]));
    EXPECT_TRUE(std::isfinite(mu1[i]));
  }
}

TEST(RepNet, DeterministicGivenSeed) {
  const Dataset d = small_dataset(5);
  const RepNetModel a = repnet_fit(d, small_config(1.0, 4));
  const RepNetModel b = repnet_fit(d, small_config(1.0, 4));
  EXPECT_EQ((a.params - b.params).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(RepNet, StrongerPenaltyReducesRepresentationImbalance) {
  const Dataset d = small_dataset(6, true);
  double mmd[4];
  const double alphas[4] = {0.0, 0.1, 1.0, 10.0};
  for (int k = 0; k < 4; ++k) {
    RepNetConfig c = small_config(alphas[k], 11);
    c.epochs = 15;
    mmd[k] = repnet_fit(d, c).trace.back().mmd;
  }
  int inversions = 0;
  for (int k = 1; k < 4; ++k) inversions += mmd[k] > mmd[k - 1];
  EXPECT_LE(inversions, 1);
  EXPECT_LT(mmd[3], mmd[0]);
}

TEST(RepNet, EmptyGroupIsFitError) {
  const Dataset d = small_dataset(7);
  EXPECT_THROW(repnet_fit(d.select_rows(d.group_rows(0)), small_config(1.0)), FitError);
}

TEST(RepNet, DivergenceIsTrainingErrorWithEpoch) {
  const Dataset d = small_dataset(8);
  RepNetConfig c = small_config(0.0);
  c.optimizer.kind = OptimizerParams::Kind::kSgd;
  c.optimizer.learning_rate = 1e8;
  c.final_lr_fraction = 1.0;
  try {
    repnet_fit(d, c);
    FAIL() << "expected divergence";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(RepNet, JsonRoundTrip) {
  const Dataset d = small_dataset(9);
  const RepNetModel m = repnet_fit(d, small_config(1.0));
  const RepNetModel back = RepNetModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  EXPECT_EQ(repnet_predict_pair(m, d), repnet_predict_pair(back, d));
}

TEST(RepNet, SchemaMismatchIsArgumentError) {
  const Dataset d = small_dataset(10);
  const RepNetModel m = repnet_fit(d, small_config(0.0));
  const Dataset other = Dataset(Schema({{"s", Level::kSchool, Kind::kCategorical, Role::kSchoolId},
                                        {"z", Level::kStudent, Kind::kNumeric, Role::kTreatment},
                                        {"y", Level::kStudent, Kind::kNumeric, Role::kOutcome}}),
                                {Column{{}, {"a"}}, Column{{1.0}, {}}, Column{{0.0}, {}}});
  EXPECT_THROW(repnet_predict_pair(m, other), ArgumentError);
}

}  // namespace
}  // namespace hetfx
