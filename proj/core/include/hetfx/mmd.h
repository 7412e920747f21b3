// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hetfx {

// Biased (V-statistic) squared MMD with the Gaussian kernel
// k(a, b) = exp(-||a - b||^2 / (2 sigma^2)); rows are points:
//   mean k(A, A) + mean k(B, B) - 2 mean k(A, B)  >= 0.
// ArgumentError on empty sets, width mismatch or sigma <= 0.
double mmd2_rbf(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma);

// Same value; also writes d(mmd2)/dA and d(mmd2)/dB (same shapes as A, B).
double mmd2_rbf_grad(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma,
                     Eigen::MatrixXd* grad_a, Eigen::MatrixXd* grad_b);

// Median Euclidean distance over pairs of at most `max_points` rows taken
// at a fixed stride. Returns 1 when the median is zero.
double median_pairwise_distance(const Eigen::MatrixXd& points, std::size_t max_points = 512);

struct PermutationTest {
  double observed = 0.0;
  std::vector<double> null_values;  // sorted ascending
  double p_value = 0.0;             // (1 + #{null >= observed}) / (1 + n)
  double null_quantile(double q) const;
};

// Label-permutation null distribution of mmd2 between A and B.
PermutationTest mmd_permutation_test(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     double sigma, std::size_t n_permutations, std::uint64_t seed);

}  // namespace hetfx
