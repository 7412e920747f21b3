// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hetfx/errors.h"
#include "hetfx/forest.h"
#include "hetfx/gbm.h"
#include "hetfx/learners.h"
#include "hetfx/mlp.h"
#include "hetfx/random.h"
#include "hetfx/ridge.h"
#include "hetfx/tree.h"

namespace hetfx {
namespace {

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) X(i++, 0) = x;
  return X;
}

struct Problem {
  Eigen::MatrixXd X;
  std::vector<double> y;
};

Problem random_problem(std::size_t n, std::size_t d, std::uint64_t seed, bool nonlinear = false) {
  Engine e(seed);
  std::normal_distribution<double> g;
  Problem p{Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)), {}};
  for (Eigen::Index i = 0; i < p.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.X.cols(); ++j) p.X(i, j) = g(e);
    const double signal = nonlinear ? (p.X(i, 0) > 0 ? 1.0 : -1.0) * (p.X(i, 1) > 0.5 ? 2.0 : 0.5)
                                    : 1.5 * p.X(i, 0) - 0.5 * p.X(i, d - 1);
    p.y.push_back(signal + 0.1 * g(e));
  }
  return p;
}

void expect_leaves_respect(const TreeModel& t, std::size_t min_rows, std::size_t min_schools) {
  for (const auto& n : t.nodes()) {
    if (!n.is_leaf()) continue;
    EXPECT_GE(n.n_rows, min_rows);
    if (min_schools > 1) {
      EXPECT_GE(n.n_schools, min_schools);
    }
  }
}

// ---- ridge -----------------------------------------------------------------

TEST(Ridge, ExactLineWithoutPenalty) {
  const std::vector<double> y = {2, 4, 6};
  const RidgeModel m = ridge_fit(column({1, 2, 3}), y, 0.0);
  EXPECT_NEAR(m.coefficients(0), 2.0, 1e-9);
  EXPECT_NEAR(m.intercept, 0.0, 1e-9);
  EXPECT_FALSE(m.rank_deficient);
}

TEST(Ridge, InfiniteShrinkageGivesMean) {
  const std::vector<double> y = {2, 4, 6};
  const RidgeModel m = ridge_fit(column({1, 2, 3}), y, 1e12);
  EXPECT_NEAR(m.coefficients(0), 0.0, 1e-3);
  EXPECT_NEAR(m.intercept, 4.0, 1e-3);
}

TEST(Ridge, HandNormalEquation) {
  // Mean-MSE convention: minimize (1/m) sum (y - b - w x)^2 + lambda w^2
  // => w = Sxy / (Sxx + m * lambda) with centred sums. Here Sxy = Sxx = 0.5.
  const std::vector<double> y = {1, 2};
  const RidgeModel m = ridge_fit(column({1, 2}), y, 1.0);
  EXPECT_NEAR(m.coefficients(0), 0.5 / (0.5 + 2.0 * 1.0), 1e-12);
  EXPECT_NEAR(m.intercept, 1.5 - m.coefficients(0) * 1.5, 1e-12);
}

TEST(Ridge, SingularSystemIsFlagged) {
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 2, 4, 3, 6;
  const std::vector<double> y = {1, 2, 3};
  const RidgeModel m = ridge_fit(X, y, 0.0);
  EXPECT_TRUE(m.rank_deficient);
  EXPECT_LT((m.predict(X) - Eigen::Vector3d(1, 2, 3)).norm(), 1e-9);
}

TEST(Ridge, PredictsSlopeTimesInput) {
  const std::vector<double> y = {2, 4, 6};
  const RidgeModel m = ridge_fit(column({1, 2, 3}), y, 0.0);
  EXPECT_NEAR(m.predict(column({5}))(0), 10.0, 1e-9);
}

TEST(Ridge, PerturbationsNeverImproveObjective) {
  const Problem p = random_problem(80, 4, 3);
  const double lambda = 0.3;
  const RidgeModel m = ridge_fit(p.X, p.y, lambda);
  const double best = RidgeModel::objective(p.X, p.y, m.coefficients, m.intercept, lambda);
  Engine e(7);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd delta(5);
    for (Eigen::Index i = 0; i < 5; ++i) delta(i) = g(e);
    delta *= 1e-3 / delta.norm();
    const double perturbed = RidgeModel::objective(p.X, p.y, m.coefficients + delta.head(4),
                                                   m.intercept + delta(4), lambda);
    EXPECT_GE(perturbed, best);
  }
}

// ---- tree ------------------------------------------------------------------

TEST(Tree, ConstantTargetGivesOneLeaf) {
  const std::vector<double> y(10, 3.5);
  const Problem p = random_problem(10, 2, 1);
  const TreeModel t = tree_fit(p.X, y, TreeParams{});
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(t.predict(p.X)(4), 3.5);
}

TEST(Tree, SeparableStep) {
  const std::vector<double> y = {0, 0, 1, 1};
  TreeParams params;
  params.max_depth = 1;
  const TreeModel t = tree_fit(column({-1, -1, 1, 1}), y, params);
  ASSERT_EQ(t.nodes().size(), 3u);
  const TreeNode& root = t.nodes()[0];
  EXPECT_GE(root.threshold, -1.0);
  EXPECT_LT(root.threshold, 1.0);
  EXPECT_DOUBLE_EQ(root.threshold, 0.0);  // midpoint
  EXPECT_DOUBLE_EQ(t.nodes()[static_cast<std::size_t>(root.left)].value, 0.0);
  EXPECT_DOUBLE_EQ(t.nodes()[static_cast<std::size_t>(root.right)].value, 1.0);
}

TEST(Tree, TiesGoToLowerFeatureIndex) {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 0, 0, 1, 1, 1, 1;
  const std::vector<double> y = {0, 0, 1, 1};
  TreeParams params;
  params.max_depth = 1;
  EXPECT_EQ(tree_fit(X, y, params).nodes()[0].feature, 0);
}

TEST(Tree, NineSchoolsCannotSatisfyTenPerLeaf) {
  const Problem p = random_problem(90, 2, 5);
  std::vector<std::size_t> schools;
  for (std::size_t i = 0; i < 90; ++i) schools.push_back(i % 9);
  TreeParams params;
  params.min_leaf_schools = 10;
  TreeFitInputs in;
  in.school_ids = schools;
  const TreeModel t = tree_fit(p.X, p.y, params, in);
  EXPECT_EQ(t.nodes().size(), 1u);
}

TEST(Tree, LeafConstraintsHoldOnEveryLeaf) {
  const Problem p = random_problem(600, 3, 9, true);
  std::vector<std::size_t> schools;
  for (std::size_t i = 0; i < 600; ++i) schools.push_back((i * 7) % 40);
  TreeParams params;
  params.max_depth = 6;
  params.min_leaf_rows = 25;
  params.min_leaf_schools = 6;
  TreeFitInputs in;
  in.school_ids = schools;
  const TreeModel t = tree_fit(p.X, p.y, params, in);
  EXPECT_GT(t.num_leaves(), 2u);
  expect_leaves_respect(t, 25, 6);
}

TEST(Tree, EmptyInputIsArgumentError) {
  EXPECT_THROW(tree_fit(Eigen::MatrixXd(0, 1), std::vector<double>{}, TreeParams{}), ArgumentError);
}

TEST(Tree, JsonRoundTripPredictsIdentically) {
  const Problem p = random_problem(200, 3, 4, true);
  const TreeModel t = tree_fit(p.X, p.y, TreeParams{});
  const TreeModel back = TreeModel::from_json(t.to_json());
  EXPECT_EQ((t.predict(p.X) - back.predict(p.X)).cwiseAbs().maxCoeff(), 0.0);
}

// ---- forest --------------------------------------------------------------

TEST(Forest, SingleUnsampledTreeEqualsTree) {
  const Problem p = random_problem(300, 4, 2, true);
  ForestParams fp;
  fp.n_trees = 1;
  fp.bootstrap = false;
  fp.row_subsample = 1.0;
  fp.feature_subsample = 1.0;
  fp.tree.max_depth = 5;
  fp.tree.min_leaf_rows = 3;
  const ForestModel f = forest_fit(p.X, p.y, fp);
  TreeParams tp = fp.tree;
  const TreeModel t = tree_fit(p.X, p.y, tp);
  EXPECT_EQ((f.predict(p.X) - t.predict(p.X)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forest, ConstantTarget) {
  const Problem p = random_problem(50, 2, 2);
  const std::vector<double> y(50, -1.25);
  ForestParams fp;
  fp.n_trees = 10;
  const Eigen::VectorXd pred = forest_fit(p.X, y, fp).predict(p.X);
  for (Eigen::Index i = 0; i < pred.size(); ++i) EXPECT_DOUBLE_EQ(pred(i), -1.25);
}

TEST(Forest, IdenticalTreesAverageToTheTree) {
  const Problem p = random_problem(100, 2, 6, true);
  const TreeModel t = tree_fit(p.X, p.y, TreeParams{});
  ForestModel f;
  f.trees = {t, t, t};
  EXPECT_LT((f.predict(p.X) - t.predict(p.X)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forest, BeatsRidgeOnNonlinearTarget) {
  const Problem train = random_problem(1500, 3, 10, true);
  const Problem valid = random_problem(500, 3, 11, true);
  ForestParams fp;
  fp.n_trees = 30;
  fp.seed = 1;
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(valid.y.data(), 500);
  const double forest_mse = (forest_fit(train.X, train.y, fp).predict(valid.X) - yv).squaredNorm();
  const double ridge_mse = (ridge_fit(train.X, train.y, 1e-2).predict(valid.X) - yv).squaredNorm();
  EXPECT_LT(forest_mse, ridge_mse);
}

TEST(Forest, DeterministicAcrossThreadCounts) {
  const Problem p = random_problem(400, 3, 12, true);
  ForestParams fp;
  fp.n_trees = 12;
  fp.seed = 99;
  const Eigen::VectorXd a = forest_fit(p.X, p.y, fp).predict(p.X);
  const Eigen::VectorXd b = forest_fit(p.X, p.y, fp).predict(p.X);
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}

// ---- boosting ------------------------------------------------------------

TEST(Gbm, DepthZeroPredictsMean) {
  const Problem p = random_problem(60, 2, 4);
  GbmParams gp;
  gp.n_rounds = 1;
  gp.learning_rate = 0.7;
  gp.tree.max_depth = 0;
  const Eigen::VectorXd pred = gbm_fit(p.X, p.y, gp).predict(p.X);
  double mean = 0;
  for (double v : p.y) mean += v;
  mean /= 60.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) EXPECT_NEAR(pred(i), mean, 1e-12);
}

TEST(Gbm, TrainingLossNonIncreasing) {
  const Problem p = random_problem(300, 3, 8, true);
  GbmParams gp;
  gp.n_rounds = 40;
  const GbmModel m = gbm_fit(p.X, p.y, gp);
  ASSERT_EQ(m.loss_trace.size(), 41u);
  for (std::size_t r = 1; r < m.loss_trace.size(); ++r) EXPECT_LE(m.loss_trace[r], m.loss_trace[r - 1] + 1e-15);
}

TEST(Gbm, OverfitsIdentity) {
  Eigen::MatrixXd X(100, 1);
  std::vector<double> y(100);
  for (int i = 0; i < 100; ++i) X(i, 0) = y[static_cast<std::size_t>(i)] = i / 10.0;
  GbmParams gp;
  gp.n_rounds = 200;
  gp.learning_rate = 0.3;
  gp.tree.max_depth = 4;
  gp.tree.min_leaf_rows = 1;
  const GbmModel m = gbm_fit(X, y, gp);
  double mean = 4.95, var = 0;
  for (double v : y) var += (v - mean) * (v - mean) / 100.0;
  EXPECT_LT(m.loss_trace.back(), 0.01 * var);
}

// ---- mlp -----------------------------------------------------------------

TEST(Mlp, AnalyticGradientMatchesFiniteDifferences) {
  const Problem p = random_problem(40, 3, 13, true);
  MlpParams mp;
  mp.hidden_layers = {7, 5};
  mp.activation = Activation::kTanh;
  const DenseStack net(3, {7, 5, 1}, Activation::kTanh, Activation::kIdentity);
  Eigen::VectorXd params(static_cast<Eigen::Index>(net.num_params()));
  Engine init(3);
  net.initialize(params.data(), init);
  Eigen::VectorXd grad;
  mlp_objective(net, params, p.X, p.y, 0.01, &grad);
  Engine pick(5);
  for (int k = 0; k < 12; ++k) {
    const auto idx = static_cast<Eigen::Index>(uniform_index(pick, net.num_params()));
    const double h = 1e-5;
    Eigen::VectorXd up = params, down = params;
    up(idx) += h;
    down(idx) -= h;
    const double fd = (mlp_objective(net, up, p.X, p.y, 0.01, nullptr) -
                       mlp_objective(net, down, p.X, p.y, 0.01, nullptr)) / (2 * h);
    EXPECT_LT(std::abs(fd - grad(idx)) / std::max(1e-8, std::abs(fd) + std::abs(grad(idx))), 1e-4)
        << "parameter " << idx;
  }
}

TEST(Mlp, ZeroWeightsOutputTheBias) {
  const DenseStack net(2, {4, 1}, Activation::kRelu, Activation::kIdentity);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()));
  params(params.size() - 1) = 0.75;
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 2);
  const Eigen::MatrixXd out = net.forward(params.data(), X, nullptr);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(out(i, 0), 0.75);
}

TEST(Mlp, LinearNetworkMatchesRidge) {
  const Problem p = random_problem(50, 2, 21);
  MlpParams mp;
  mp.hidden_layers = {};
  mp.zero_init = true;
  mp.l2_penalty = 0.05;
  mp.epochs = 3000;
  mp.batch_size = 50;
  mp.optimizer.learning_rate = 0.01;
  const MlpModel m = mlp_fit(p.X, p.y, mp);
  const RidgeModel r = ridge_fit(p.X, p.y, 0.05);
  EXPECT_LT((m.predict(p.X) - r.predict(p.X)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Mlp, DeterministicAndFiniteTrace) {
  const Problem p = random_problem(120, 3, 2, true);
  MlpParams mp;
  mp.hidden_layers = {8};
  mp.epochs = 15;
  mp.seed = 4;
  const MlpModel a = mlp_fit(p.X, p.y, mp);
  const MlpModel b = mlp_fit(p.X, p.y, mp);
  EXPECT_EQ((a.params - b.params).cwiseAbs().maxCoeff(), 0.0);
  for (double l : a.loss_trace) EXPECT_TRUE(std::isfinite(l));
}

TEST(Mlp, DivergenceNamesTheEpoch) {
  const Problem p = random_problem(50, 2, 2);
  MlpParams mp;
  mp.hidden_layers = {16};
  mp.optimizer.kind = OptimizerParams::Kind::kSgd;
  mp.optimizer.learning_rate = 1e6;
  mp.epochs = 50;
  try {
    mlp_fit(p.X, p.y, mp);
    FAIL() << "expected divergence";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

// ---- common contract -------------------------------------------------------

TEST(FittedModel, WidthMismatchIsArgumentError) {
  const Problem p = random_problem(30, 3, 1);
  EstimatorConfig cfg;
  const FittedModel m = fit(cfg, p.X, p.y);
  EXPECT_THROW(m.predict(Eigen::MatrixXd::Zero(2, 2)), ArgumentError);
}

TEST(FittedModel, EveryFamilyRoundTripsThroughJson) {
  const Problem p = random_problem(120, 3, 3, true);
  for (Family f : {Family::kRidge, Family::kTree, Family::kForest, Family::kGbm, Family::kMlp}) {
    EstimatorConfig cfg;
    cfg.family = f;
    cfg.forest.n_trees = 5;
    cfg.gbm.n_rounds = 5;
    cfg.mlp.epochs = 3;
    const FittedModel m = fit(cfg.with_seed(8), p.X, p.y);
    const FittedModel back = FittedModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    EXPECT_EQ(back.family(), f);
    EXPECT_EQ((m.predict(p.X) - back.predict(p.X)).cwiseAbs().maxCoeff(), 0.0) << to_string(f);
  }
}

TEST(FittedModel, SameSeedSameParameters) {
  const Problem p = random_problem(150, 3, 4, true);
  for (Family f : {Family::kForest, Family::kGbm, Family::kMlp}) {
    EstimatorConfig cfg;
    cfg.family = f;
    cfg.forest.n_trees = 4;
    cfg.gbm.row_subsample = 0.7;
    cfg.gbm.n_rounds = 6;
    cfg.mlp.epochs = 4;
    EXPECT_EQ(fit(cfg.with_seed(2), p.X, p.y).to_json(), fit(cfg.with_seed(2), p.X, p.y).to_json());
  }
}

TEST(EstimatorConfig, FlatKeysAndValidation) {
  const EstimatorConfig c = EstimatorConfig::from_json({{"family", "ridge"}, {"lambda", 3.0}});
  EXPECT_EQ(c.ridge_lambda, 3.0);
  EXPECT_THROW(EstimatorConfig::from_json({{"family", "ridge"}, {"lambda", -1.0}}), ArgumentError);
  EXPECT_THROW(EstimatorConfig::from_json({{"family", "svm"}}), ArgumentError);
}

}  // namespace
}  // namespace hetfx
