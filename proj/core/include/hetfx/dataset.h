// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace hetfx {

enum class Level { kStudent, kSchool };
enum class Kind { kNumeric, kCategorical };
enum class Role { kCovariate, kTreatment, kOutcome, kSchoolId };

std::string to_string(Level level);
std::string to_string(Kind kind);
std::string to_string(Role role);

struct ColumnSpec {
  std::string name;
  Level level = Level::kStudent;
  Kind kind = Kind::kNumeric;
  Role role = Role::kCovariate;
};

// Ordered column description of a multi-level dataset: student- and
// school-level covariates plus exactly one treatment, outcome and school id
// column.
class Schema {
 public:
  Schema() = default;
  // Throws SchemaError when the role/uniqueness invariants are violated.
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const ColumnSpec& column(std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // SchemaError if absent

  std::size_t treatment_column() const { return treatment_; }
  std::size_t outcome_column() const { return outcome_; }
  std::size_t school_column() const { return school_; }
  // Covariate column indices in schema order.
  const std::vector<std::size_t>& covariates() const { return covariates_; }
  std::vector<std::string> covariate_names() const;

  nlohmann::json to_json() const;
  static Schema from_json(const nlohmann::json& j);
  static Schema load(const std::filesystem::path& path);

  bool operator==(const Schema& other) const;

 private:
  std::vector<ColumnSpec> columns_;
  std::size_t treatment_ = 0;
  std::size_t outcome_ = 0;
  std::size_t school_ = 0;
  std::vector<std::size_t> covariates_;
};

// Raw values of one column. Numeric columns (including treatment and
// outcome) use `numbers`; categorical columns and the school id use
// `labels`.
struct Column {
  std::vector<double> numbers;
  std::vector<std::string> labels;
};

// Immutable table of m student rows grouped into n schools.
class Dataset {
 public:
  Dataset() = default;
  // Validates treatment in {0,1}, finite outcomes, non-empty school ids and
  // column lengths. `row_ids` defaults to 0..m-1.
  Dataset(Schema schema, std::vector<Column> columns,
          std::vector<std::int64_t> row_ids = {});

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return treatment_.size(); }
  std::size_t num_schools() const { return school_labels_.size(); }

  int treatment(std::size_t row) const { return treatment_[row]; }
  double outcome(std::size_t row) const { return outcome_[row]; }
  std::span<const int> treatments() const { return treatment_; }
  std::span<const double> outcomes() const { return outcome_; }

  // Dense school index in [0, num_schools) ordered by first appearance.
  std::size_t school_of(std::size_t row) const { return school_of_[row]; }
  std::span<const std::size_t> schools() const { return school_of_; }
  const std::string& school_label(std::size_t school) const {
    return school_labels_[school];
  }
  const std::vector<std::string>& school_labels() const {
    return school_labels_;
  }
  const std::vector<std::size_t>& rows_of_school(std::size_t school) const {
    return school_rows_[school];
  }
  std::optional<std::size_t> find_school(const std::string& label) const;

  std::int64_t row_id(std::size_t row) const { return row_ids_[row]; }
  std::span<const std::int64_t> row_ids() const { return row_ids_; }

  const Column& column(std::size_t schema_index) const {
    return columns_[schema_index];
  }
  const Column& column(const std::string& name) const {
    return columns_[schema_.index_of(name)];
  }

  // Row index sets G_0 and G_1.
  std::vector<std::size_t> group_rows(int z) const;

  // New dataset made of the given rows (duplicates allowed), keeping row ids.
  Dataset select_rows(std::span<const std::size_t> rows) const;
  // Same rows with the school id column replaced.
  Dataset with_school_labels(std::vector<std::string> labels) const;
  // Same covariates and schools, outcome column replaced.
  Dataset with_outcomes(std::vector<double> outcomes) const;
  // Same covariates and schools, treatment column replaced.
  Dataset with_treatments(std::vector<int> treatments) const;

 private:
  Schema schema_;
  std::vector<Column> columns_;
  std::vector<std::int64_t> row_ids_;
  std::vector<int> treatment_;
  std::vector<double> outcome_;
  std::vector<std::size_t> school_of_;
  std::vector<std::string> school_labels_;
  std::vector<std::vector<std::size_t>> school_rows_;
  std::map<std::string, std::size_t> school_lookup_;
};

// Comma-separated input with a header row naming every schema column
// (any order). Errors: SchemaError for missing/unknown columns,
// ValidationError naming the 1-based data row for bad values.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset read_csv(std::istream& in, const Schema& schema);

// Writes columns in schema order using shortest round-trip number
// formatting, so load_csv(write_csv(d)) reproduces d bit-for-bit.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);
void write_csv(const Dataset& dataset, std::ostream& out);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace hetfx
