// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/encoding.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "hetfx/errors.h"

namespace hetfx {

std::size_t FeatureMatrix::index_of(const std::string& feature_name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == feature_name) return i;
  }
  throw ArgumentError("unknown feature '" + feature_name + "'");
}

Encoder Encoder::fit(const Dataset& dataset, const EncoderOptions& options) {
  std::vector<std::size_t> all(dataset.num_rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit(dataset, all, options);
}

Encoder Encoder::fit(const Dataset& dataset, std::span<const std::size_t> fit_on,
                     const EncoderOptions& options) {
  if (fit_on.empty()) throw ArgumentError("encode: fit_on row set is empty");
  const auto& schema = dataset.schema();
  std::vector<std::size_t> columns;
  if (options.covariates.empty()) {
    columns = schema.covariates();
  } else {
    for (const auto& name : options.covariates) {
      const auto idx = schema.find(name);
      if (!idx || schema.column(*idx).role != Role::kCovariate) {
        throw ArgumentError("unknown covariate '" + name + "'");
      }
    }
    for (auto c : schema.covariates()) {
      if (std::find(options.covariates.begin(), options.covariates.end(),
                    schema.column(c).name) != options.covariates.end()) {
        columns.push_back(c);
      }
    }
  }

  Encoder enc;
  enc.standardize_ = options.standardize;
  const double n = static_cast<double>(fit_on.size());
  for (auto c : columns) {
    const auto& spec = schema.column(c);
    const auto& col = dataset.column(c);
    if (spec.kind == Kind::kNumeric) {
      FeatureSource src{spec.name, Kind::kNumeric, spec.level, 0.0, 1.0, {}};
      if (options.standardize) {
        double sum = 0.0;
        for (auto r : fit_on) sum += col.numbers.at(r);
        const double mean = sum / n;
        double ss = 0.0;
        for (auto r : fit_on) {
          const double d = col.numbers[r] - mean;
          ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        src.mean = mean;
        src.stddev = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
      }
      enc.names_.push_back(spec.name);
      enc.sources_.push_back(std::move(src));
    } else {
      std::set<std::string> cats;
      for (auto r : fit_on) cats.insert(col.labels.at(r));
      for (const auto& cat : cats) {
        enc.names_.push_back(spec.name + "=" + cat);
        enc.sources_.push_back({spec.name, Kind::kCategorical, spec.level, 0.0, 1.0, cat});
      }
    }
  }
  return enc;
}

FeatureMatrix Encoder::transform(const Dataset& dataset) const {
  const auto& schema = dataset.schema();
  const std::size_t m = dataset.num_rows();
  FeatureMatrix fm;
  fm.values.setZero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(sources_.size()));
  fm.feature_names = names_;
  fm.sources = sources_;
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    const auto& src = sources_[j];
    const auto idx = schema.find(src.column);
    if (!idx || schema.column(*idx).kind != src.kind) {
      throw ArgumentError("dataset is not compatible with encoder: column '" + src.column + "'");
    }
    const auto& col = dataset.column(*idx);
    const auto jj = static_cast<Eigen::Index>(j);
    if (src.kind == Kind::kNumeric) {
      for (std::size_t r = 0; r < m; ++r) {
        fm.values(static_cast<Eigen::Index>(r), jj) =
            standardize_ ? (col.numbers[r] - src.mean) / src.stddev : col.numbers[r];
      }
    } else {
      for (std::size_t r = 0; r < m; ++r) {
        fm.values(static_cast<Eigen::Index>(r), jj) = col.labels[r] == src.category ? 1.0 : 0.0;
      }
    }
  }
  return fm;
}

nlohmann::json Encoder::to_json() const {
  nlohmann::json feats = nlohmann::json::array();
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    const auto& s = sources_[j];
    nlohmann::json f = {{"name", names_[j]},
                        {"column", s.column},
                        {"kind", to_string(s.kind)},
                        {"level", to_string(s.level)}};
    if (s.kind == Kind::kNumeric) {
      f["mean"] = s.mean;
      f["stddev"] = s.stddev;
    } else {
      f["category"] = s.category;
    }
    feats.push_back(std::move(f));
  }
  return {{"standardize", standardize_}, {"features", feats}};
}

Encoder Encoder::from_json(const nlohmann::json& j) {
  Encoder enc;
  enc.standardize_ = j.at("standardize").get<bool>();
  for (const auto& f : j.at("features")) {
    FeatureSource s;
    s.column = f.at("column").get<std::string>();
    s.kind = f.at("kind").get<std::string>() == "numeric" ? Kind::kNumeric : Kind::kCategorical;
    s.level = f.at("level").get<std::string>() == "student" ? Level::kStudent : Level::kSchool;
    if (s.kind == Kind::kNumeric) {
      s.mean = f.at("mean").get<double>();
      s.stddev = f.at("stddev").get<double>();
    } else {
      s.category = f.at("category").get<std::string>();
    }
    enc.names_.push_back(f.at("name").get<std::string>());
    enc.sources_.push_back(std::move(s));
  }
  return enc;
}

FeatureMatrix encode(const Dataset& dataset, std::span<const std::size_t> fit_on,
                     const EncoderOptions& options) {
  return Encoder::fit(dataset, fit_on, options).transform(dataset);
}

}  // namespace hetfx
