// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hetfx/dataset.h"

namespace hetfx::testing {

// Builds small datasets column by column.
class TableBuilder {
 public:
  TableBuilder(std::vector<std::string> schools, std::vector<int> z, std::vector<double> y) {
    specs_.push_back({"school", Level::kSchool, Kind::kCategorical, Role::kSchoolId});
    specs_.push_back({"z", Level::kStudent, Kind::kNumeric, Role::kTreatment});
    specs_.push_back({"y", Level::kStudent, Kind::kNumeric, Role::kOutcome});
    Column s, zc, yc;
    s.labels = std::move(schools);
    for (int v : z) zc.numbers.push_back(v);
    yc.numbers = std::move(y);
    columns_ = {s, zc, yc};
  }

  TableBuilder& numeric(const std::string& name, std::vector<double> values, Level level = Level::kStudent) {
    specs_.push_back({name, level, Kind::kNumeric, Role::kCovariate});
    Column c;
    c.numbers = std::move(values);
    columns_.push_back(std::move(c));
    return *this;
  }

  TableBuilder& categorical(const std::string& name, std::vector<std::string> values,
                            Level level = Level::kSchool) {
    specs_.push_back({name, level, Kind::kCategorical, Role::kCovariate});
    Column c;
    c.labels = std::move(values);
    columns_.push_back(std::move(c));
    return *this;
  }

  Dataset build() const { return Dataset(Schema(specs_), columns_); }

 private:
  std::vector<ColumnSpec> specs_;
  std::vector<Column> columns_;
};

inline std::vector<std::string> school_labels(std::size_t rows, std::size_t per_school) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rows; ++i) out.push_back("s" + std::to_string(i / per_school));
  return out;
}

}  // namespace hetfx::testing
