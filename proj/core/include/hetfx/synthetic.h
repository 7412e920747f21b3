// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetfx/dataset.h"
#include "json.hpp"

namespace hetfx {

// Generator for NSLM-shaped data with known potential outcomes.
//
// Columns: school id "schoolid", treatment "Z", outcome "Y", student
// covariates S3, C1, C2, C3 and school covariates X1..X5 (numeric) and XC
// (categorical). Covariate distributions:
//   S3 ~ uniform integer {1..7}       C1 ~ uniform integer {1..15}
//   C2 ~ uniform integer {1, 2}       C3 ~ Bernoulli(0.5) in {0, 1}
//   X1..X5 ~ iid Normal(0, 1) per school
//   XC ~ uniform over {A, B, C, D} per school
// Linear terms may reference a numeric covariate by name or a category
// indicator as "XC=<category>".
//
// Y = mu0(x) + Z * tau(x) + eps, eps ~ Normal(0, noise_sd^2), where
// mu0(x) = intercept + sum coef * x + u_school, u_school ~ Normal(0, school_effect_sd^2)
// and Z ~ Bernoulli(propensity(x)).

struct ThresholdCondition {
  std::string covariate;
  bool greater = false;  // true: x > threshold, false: x < threshold
  double threshold = 0.0;
};

struct EffectSpec {
  enum class Kind { kConstant, kLinear, kThreshold };
  Kind kind = Kind::kConstant;
  // constant: the effect; linear: intercept; threshold: base effect.
  double value = 0.0;
  std::map<std::string, double> coefficients;      // linear
  std::vector<ThresholdCondition> conditions;      // threshold (conjunction)
  double delta = 0.0;                              // threshold: added when all hold

  static EffectSpec constant(double c);
  static EffectSpec linear(double intercept, std::map<std::string, double> coefficients);
  static EffectSpec threshold(double base, double delta,
                              std::vector<ThresholdCondition> conditions);
};

struct BaselineSpec {
  double intercept = 0.1;
  std::map<std::string, double> coefficients = {
      {"S3", 0.1}, {"C3", -0.1}, {"X1", -0.1}, {"X2", 0.1}};
  double school_effect_sd = 0.1;
};

struct PropensitySpec {
  enum class Kind { kConstant, kLogistic };
  Kind kind = Kind::kConstant;
  double value = 0.5;  // constant
  double intercept = 0.0;
  std::map<std::string, double> coefficients;
  // Probabilities are clipped to [bound, 1 - bound].
  double overlap_bound = 0.01;
};

struct SyntheticConfig {
  std::size_t n_schools = 76;
  std::size_t students_per_school = 140;
  std::size_t students_per_school_jitter = 0;  // count ~ uniform in +/- jitter
  EffectSpec effect;
  BaselineSpec baseline;
  PropensitySpec propensity;
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
  // Overrides the drawn treatment for every row; other draws are unchanged.
  std::optional<int> force_treatment;

  static SyntheticConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GroundTruth {
  std::vector<double> tau;
  std::vector<double> mu0;
  std::vector<double> propensity;
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
};

Schema synthetic_schema();

// Deterministic given config.seed. ArgumentError on invalid config or an
// effect/baseline/propensity term naming an unknown covariate.
SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace hetfx
