// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "hetfx/dataset.h"
#include "json.hpp"

namespace hetfx {

// Where one encoded column comes from.
struct FeatureSource {
  std::string column;     // schema covariate name
  Kind kind = Kind::kNumeric;
  Level level = Level::kStudent;
  double mean = 0.0;      // numeric: fitted mean (0 when not standardizing)
  double stddev = 1.0;    // numeric: fitted population stddev (1 for constants)
  std::string category;   // categorical: indicator category
};

struct FeatureMatrix {
  Eigen::MatrixXd values;  // m x d
  std::vector<std::string> feature_names;
  std::vector<FeatureSource> sources;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  // Index of the named feature; ArgumentError when absent.
  std::size_t index_of(const std::string& feature_name) const;
};

struct EncoderOptions {
  // Standardize numeric columns with fitted (mean, population stddev).
  // When false numeric columns pass through in raw units.
  bool standardize = true;
  // Subset of covariate names to encode (schema order is kept). Empty
  // means every covariate.
  std::vector<std::string> covariates;
};

// Column statistics fitted on a row subset and applied to any
// schema-compatible dataset. Numeric columns are standardized; categorical
// columns become one indicator per fitted category (lexicographic order),
// unseen categories map to an all-zero group.
class Encoder {
 public:
  Encoder() = default;
  static Encoder fit(const Dataset& dataset, std::span<const std::size_t> fit_on,
                     const EncoderOptions& options = {});
  // Fit on every row.
  static Encoder fit(const Dataset& dataset, const EncoderOptions& options = {});

  FeatureMatrix transform(const Dataset& dataset) const;

  std::size_t width() const { return sources_.size(); }
  const std::vector<FeatureSource>& sources() const { return sources_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  bool standardized() const { return standardize_; }

  nlohmann::json to_json() const;
  static Encoder from_json(const nlohmann::json& j);

 private:
  bool standardize_ = true;
  std::vector<FeatureSource> sources_;
  std::vector<std::string> names_;
};

// Fit on `fit_on` rows and transform every row.
FeatureMatrix encode(const Dataset& dataset, std::span<const std::size_t> fit_on,
                     const EncoderOptions& options = {});

}  // namespace hetfx
