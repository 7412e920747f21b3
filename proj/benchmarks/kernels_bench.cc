// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <benchmark/benchmark.h>

#include <random>

#include "hetfx/inference.h"
#include "hetfx/mmd.h"
#include "hetfx/ridge.h"
#include "hetfx/splitting.h"
#include "hetfx/synthetic.h"
#include "hetfx/tree.h"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 e(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = g(e);
  }
  return X;
}

std::vector<double> target(const Eigen::MatrixXd& X) {
  std::vector<double> y(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[static_cast<std::size_t>(i)] = X(i, 0) - 0.5 * X(i, 1) * X(i, 2);
  return y;
}

void BM_Mmd(benchmark::State& state) {
  const Eigen::MatrixXd A = gaussian(state.range(0), 16, 1), B = gaussian(state.range(0), 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::mmd2_rbf(A, B, 2.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Mmd)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_MmdGrad(benchmark::State& state) {
  const Eigen::MatrixXd A = gaussian(state.range(0), 16, 1), B = gaussian(state.range(0), 16, 2);
  Eigen::MatrixXd ga, gb;
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::mmd2_rbf_grad(A, B, 2.0, &ga, &gb));
}
BENCHMARK(BM_MmdGrad)->Arg(128);

void BM_TreeFit(benchmark::State& state) {
  const Eigen::MatrixXd X = gaussian(state.range(0), 13, 3);
  const auto y = target(X);
  hetfx::TreeParams p;
  p.max_depth = 8;
  p.min_leaf_rows = 20;
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::tree_fit(X, y, p));
}
BENCHMARK(BM_TreeFit)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Ridge(benchmark::State& state) {
  const Eigen::MatrixXd X = gaussian(state.range(0), 13, 4);
  const auto y = target(X);
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::ridge_fit(X, y, 1e-2));
}
BENCHMARK(BM_Ridge)->Arg(2000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_BalancedSplit(benchmark::State& state) {
  hetfx::SyntheticConfig cfg;
  cfg.seed = 5;
  const hetfx::Dataset d = hetfx::generate_synthetic(cfg).dataset;
  hetfx::SplitParams p;
  p.n_candidates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::balanced_split(d, p));
}
BENCHMARK(BM_BalancedSplit)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ResampleSchools(benchmark::State& state) {
  hetfx::SyntheticConfig cfg;
  cfg.seed = 6;
  const hetfx::Dataset d = hetfx::generate_synthetic(cfg).dataset;
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hetfx::resample_schools(d, 7, ++k));
}
BENCHMARK(BM_ResampleSchools)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
