// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/splitting.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/encoding.h"
#include "hetfx/errors.h"
#include "hetfx/parallel.h"
#include "hetfx/random.h"

namespace hetfx {
namespace {

// Per-school sufficient statistics of the encoded covariates.
struct SchoolSums {
  double count = 0.0;
  std::vector<double> sum;
  std::vector<double> sum_sq;
  double treated = 0.0;
};

std::vector<SchoolSums> school_sums(const Dataset& dataset) {
  const FeatureMatrix fm = Encoder::fit(dataset).transform(dataset);
  const std::size_t d = fm.cols();
  std::vector<SchoolSums> sums(dataset.num_schools());
  for (auto& s : sums) {
    s.sum.assign(d, 0.0);
    s.sum_sq.assign(d, 0.0);
  }
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    auto& s = sums[dataset.school_of(r)];
    s.count += 1.0;
    s.treated += dataset.treatment(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double v = fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      s.sum[c] += v;
      s.sum_sq[c] += v * v;
    }
  }
  return sums;
}

MomentVector moments_from(const std::vector<SchoolSums>& sums,
                          const std::vector<std::size_t>& schools, MomentWeighting weighting) {
  const std::size_t d = sums.empty() ? 0 : sums.front().sum.size();
  MomentVector mv;
  mv.means.assign(d, 0.0);
  mv.second_moments.assign(d, 0.0);
  double share = 0.0;
  double total = 0.0;
  for (auto j : schools) {
    const auto& s = sums[j];
    if (weighting == MomentWeighting::kStudent) {
      for (std::size_t c = 0; c < d; ++c) {
        mv.means[c] += s.sum[c];
        mv.second_moments[c] += s.sum_sq[c];
      }
      share += s.treated;
      total += s.count;
    } else {
      for (std::size_t c = 0; c < d; ++c) {
        mv.means[c] += s.sum[c] / s.count;
        mv.second_moments[c] += s.sum_sq[c] / s.count;
      }
      share += s.treated / s.count;
      total += 1.0;
    }
  }
  if (total > 0.0) {
    for (std::size_t c = 0; c < d; ++c) {
      mv.means[c] /= total;
      mv.second_moments[c] /= total;
    }
    share /= total;
  }
  mv.treatment_share = share;
  return mv;
}

std::vector<std::size_t> rows_for(const Dataset& dataset, const std::vector<std::size_t>& schools) {
  std::vector<bool> member(dataset.num_schools(), false);
  for (auto j : schools) member.at(j) = true;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    if (member[dataset.school_of(r)]) rows.push_back(r);
  }
  return rows;
}

}  // namespace

double split_score(const MomentVector& a, const MomentVector& b, double treatment_weight) {
  if (a.means.size() != b.means.size() || a.second_moments.size() != b.second_moments.size() ||
      a.treatment_share.has_value() != b.treatment_share.has_value()) {
    throw ArgumentError("split_score: moment vectors differ in length");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.means.size(); ++i) {
    const double d = a.means[i] - b.means[i];
    ss += d * d;
  }
  for (std::size_t i = 0; i < a.second_moments.size(); ++i) {
    const double d = a.second_moments[i] - b.second_moments[i];
    ss += d * d;
  }
  if (a.treatment_share) {
    const double d = treatment_weight * (*a.treatment_share - *b.treatment_share);
    ss += d * d;
  }
  return std::sqrt(ss);
}

MomentVector side_moments(const Dataset& dataset, const std::vector<std::size_t>& schools,
                          MomentWeighting weighting) {
  return moments_from(school_sums(dataset), schools, weighting);
}

std::vector<std::size_t> SplitAssignment::train_rows(const Dataset& dataset) const {
  return rows_for(dataset, train_schools);
}

std::vector<std::size_t> SplitAssignment::valid_rows(const Dataset& dataset) const {
  return rows_for(dataset, valid_schools);
}

nlohmann::json SplitAssignment::to_json(const Dataset& dataset) const {
  auto labels = [&](const std::vector<std::size_t>& schools) {
    std::vector<std::string> out;
    for (auto j : schools) out.push_back(dataset.school_label(j));
    return out;
  };
  const auto n_train_rows = train_rows(dataset).size();
  return {
      {"train_schools", labels(train_schools)},
      {"valid_schools", labels(valid_schools)},
      {"score", score},
      {"candidate_count", candidate_count},
      {"chosen_candidate", chosen_candidate},
      {"seed", seed},
      {"train_rows", n_train_rows},
      {"valid_rows", dataset.num_rows() - n_train_rows},
      {"parameters",
       {{"train_frac", params.train_frac},
        {"train_frac_applies_to", "school count"},
        {"n_candidates", params.n_candidates},
        {"treatment_weight", params.treatment_weight},
        {"moment_weighting",
         params.moment_weighting == MomentWeighting::kStudent ? "student" : "school"}}},
  };
}

SplitAssignment balanced_split(const Dataset& dataset, const SplitParams& params) {
  const std::size_t n = dataset.num_schools();
  if (n < 2) throw ArgumentError("balanced_split: need at least 2 schools");
  if (!(params.train_frac > 0.0 && params.train_frac < 1.0)) {
    throw ArgumentError("balanced_split: train_frac must be in (0, 1)");
  }
  if (params.n_candidates < 1) throw ArgumentError("balanced_split: n_candidates must be >= 1");

  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(params.train_frac * static_cast<double>(n))), 1, n - 1);
  const auto sums = school_sums(dataset);

  auto candidate = [&](std::size_t k) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Engine engine = make_engine(params.seed, k);
    std::shuffle(perm.begin(), perm.end(), engine);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> valid(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
    return std::pair{train, valid};
  };

  std::vector<double> scores(params.n_candidates);
  parallel_for(params.n_candidates, [&](std::size_t k) {
    auto [train, valid] = candidate(k);
    scores[k] = split_score(moments_from(sums, train, params.moment_weighting),
                            moments_from(sums, valid, params.moment_weighting),
                            params.treatment_weight);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] < scores[best]) best = k;
  }

  SplitAssignment out;
  std::tie(out.train_schools, out.valid_schools) = candidate(best);
  out.score = scores[best];
  out.candidate_count = params.n_candidates;
  out.chosen_candidate = best;
  out.seed = params.seed;
  out.params = params;
  return out;
}

}  // namespace hetfx
