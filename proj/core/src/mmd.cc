// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/mmd.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {
namespace {

Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma) {
  const Eigen::VectorXd na = A.rowwise().squaredNorm();
  const Eigen::VectorXd nb = B.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (A * B.transpose());
  d2.colwise() += na;
  d2.rowwise() += nb.transpose();
  const double scale = -1.0 / (2.0 * sigma * sigma);
  return (d2.cwiseMax(0.0) * scale).array().exp();
}

void check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma) {
  if (A.rows() == 0 || B.rows() == 0) throw ArgumentError("mmd2_rbf: point sets must be non-empty");
  if (A.cols() != B.cols()) throw ArgumentError("mmd2_rbf: point sets differ in dimension");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("mmd2_rbf: sigma must be > 0");
}

}  // namespace

double mmd2_rbf(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma) {
  check(A, B, sigma);
  const double na = static_cast<double>(A.rows());
  const double nb = static_cast<double>(B.rows());
  const double kaa = gaussian_kernel(A, A, sigma).sum() / (na * na);
  const double kbb = gaussian_kernel(B, B, sigma).sum() / (nb * nb);
  const double kab = gaussian_kernel(A, B, sigma).sum() / (na * nb);
  return std::max(0.0, kaa + kbb - 2.0 * kab);
}

double mmd2_rbf_grad(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double sigma,
                     Eigen::MatrixXd* grad_a, Eigen::MatrixXd* grad_b) {
  check(A, B, sigma);
  const double na = static_cast<double>(A.rows());
  const double nb = static_cast<double>(B.rows());
  const Eigen::MatrixXd Kaa = gaussian_kernel(A, A, sigma);
  const Eigen::MatrixXd Kbb = gaussian_kernel(B, B, sigma);
  const Eigen::MatrixXd Kab = gaussian_kernel(A, B, sigma);
  const double s2 = sigma * sigma;
  // sum_j K(i, j) (u_i - v_j) = rowsum(K)_i u_i - (K V)_i
  auto pull = [](const Eigen::MatrixXd& K, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    Eigen::MatrixXd out = U.array().colwise() * K.rowwise().sum().array();
    out -= K * V;
    return out;
  };
  if (grad_a) {
    *grad_a = (-2.0 / (na * na * s2)) * pull(Kaa, A, A) + (2.0 / (na * nb * s2)) * pull(Kab, A, B);
  }
  if (grad_b) {
    const Eigen::MatrixXd Kba = Kab.transpose();
    *grad_b = (-2.0 / (nb * nb * s2)) * pull(Kbb, B, B) + (2.0 / (na * nb * s2)) * pull(Kba, B, A);
  }
  // Unclamped value keeps the gradient consistent with the reported value.
  return Kaa.sum() / (na * na) + Kbb.sum() / (nb * nb) - 2.0 * Kab.sum() / (na * nb);
}

double median_pairwise_distance(const Eigen::MatrixXd& points, std::size_t max_points) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 2) return 1.0;
  const std::size_t k = std::min(n, std::max<std::size_t>(2, max_points));
  std::vector<Eigen::Index> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<Eigen::Index>(i * n / k);
  std::vector<double> d;
  d.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) d.push_back((points.row(idx[i]) - points.row(idx[j])).norm());
  }
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(d.begin(), mid));
  }
  return med > 0.0 ? med : 1.0;
}

double PermutationTest::null_quantile(double q) const {
  if (null_values.empty()) return 0.0;
  const double pos = q * static_cast<double>(null_values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, null_values.size() - 1);
  return null_values[lo] + (pos - static_cast<double>(lo)) * (null_values[hi] - null_values[lo]);
}

PermutationTest mmd_permutation_test(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     double sigma, std::size_t n_permutations, std::uint64_t seed) {
  check(A, B, sigma);
  const auto na = static_cast<std::size_t>(A.rows());
  const auto nb = static_cast<std::size_t>(B.rows());
  Eigen::MatrixXd pooled(A.rows() + B.rows(), A.cols());
  pooled << A, B;
  const Eigen::MatrixXd K = gaussian_kernel(pooled, pooled, sigma);
  const std::size_t n = na + nb;
  auto statistic = [&](const std::vector<char>& in_a) {
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double k = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (in_a[i] && in_a[j]) {
          saa += k;
        } else if (!in_a[i] && !in_a[j]) {
          sbb += k;
        } else if (in_a[i]) {
          sab += k;
        }
      }
    }
    const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
    return std::max(0.0, saa / (fa * fa) + sbb / (fb * fb) - 2.0 * sab / (fa * fb));
  };
  std::vector<char> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(na), 1);
  PermutationTest out;
  out.observed = mmd2_rbf(A, B, sigma);
  Engine engine = make_engine(seed, 0);
  std::size_t exceed = 0;
  for (std::size_t p = 0; p < n_permutations; ++p) {
    std::shuffle(labels.begin(), labels.end(), engine);
    const double v = statistic(labels);
    out.null_values.push_back(v);
    if (v >= out.observed) ++exceed;
  }
  std::sort(out.null_values.begin(), out.null_values.end());
  out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + n_permutations);
  return out;
}

}  // namespace hetfx
