// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetfx/dataset.h"
#include "json.hpp"

namespace hetfx {

// First and second raw moments of every encoded covariate column, followed
// (optionally) by the treatment share.
struct MomentVector {
  std::vector<double> means;
  std::vector<double> second_moments;
  std::optional<double> treatment_share;

  std::size_t size() const {
    return means.size() + second_moments.size() + (treatment_share ? 1 : 0);
  }
};

// Euclidean distance between two moment vectors with the treatment-share
// coordinate scaled by `treatment_weight`. ArgumentError on shape mismatch.
double split_score(const MomentVector& a, const MomentVector& b, double treatment_weight = 10.0);

enum class MomentWeighting { kStudent, kSchool };

struct SplitParams {
  double train_frac = 0.8;
  std::size_t n_candidates = 10000;
  double treatment_weight = 10.0;
  std::uint64_t seed = 0;
  MomentWeighting moment_weighting = MomentWeighting::kStudent;
};

// School-level partition into training and validation sides. School sets
// hold dense school indices of the dataset the split was computed on,
// sorted ascending.
struct SplitAssignment {
  std::vector<std::size_t> train_schools;
  std::vector<std::size_t> valid_schools;
  double score = 0.0;
  std::size_t candidate_count = 0;
  std::size_t chosen_candidate = 0;
  std::uint64_t seed = 0;
  SplitParams params;

  std::vector<std::size_t> train_rows(const Dataset& dataset) const;
  std::vector<std::size_t> valid_rows(const Dataset& dataset) const;
  nlohmann::json to_json(const Dataset& dataset) const;
};

// Moments of the encoded covariates (standardized on all rows, one-hot
// categoricals) over the rows of the given schools.
MomentVector side_moments(const Dataset& dataset, const std::vector<std::size_t>& schools,
                          MomentWeighting weighting = MomentWeighting::kStudent);

// Random search over `n_candidates` uniform school partitions with
// round(train_frac * n) training schools (clamped to [1, n-1]); returns the
// minimum-score candidate, ties to the lowest candidate index. Candidate k
// is drawn from its own substream of `seed`, so a run with more candidates
// extends the candidate set of a run with fewer.
SplitAssignment balanced_split(const Dataset& dataset, const SplitParams& params);

}  // namespace hetfx
