// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/dataset.h"

#include <cmath>
#include <fstream>
#include <set>

#include "hetfx/errors.h"

namespace hetfx {
namespace {

template <typename E>
E parse_enum(const nlohmann::json& j, const char* key,
             const std::vector<std::pair<std::string, E>>& options) {
  if (!j.contains(key)) throw SchemaError(std::string("column missing '") + key + "'");
  const std::string value = j.at(key).get<std::string>();
  for (const auto& [name, e] : options) {
    if (name == value) return e;
  }
  throw SchemaError("invalid value '" + value + "' for column field '" + key + "'");
}

}  // namespace

std::string to_string(Level level) {
  return level == Level::kStudent ? "student" : "school";
}
std::string to_string(Kind kind) {
  return kind == Kind::kNumeric ? "numeric" : "categorical";
}
std::string to_string(Role role) {
  switch (role) {
    case Role::kCovariate: return "covariate";
    case Role::kTreatment: return "treatment";
    case Role::kOutcome: return "outcome";
    case Role::kSchoolId: return "school_id";
  }
  return "covariate";
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  int n_treatment = 0, n_outcome = 0, n_school = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (c.name.empty()) throw SchemaError("column " + std::to_string(i) + " has an empty name");
    if (!names.insert(c.name).second) throw SchemaError("duplicate column name '" + c.name + "'");
    switch (c.role) {
      case Role::kTreatment:
        ++n_treatment;
        treatment_ = i;
        if (c.kind != Kind::kNumeric) throw SchemaError("treatment column must be numeric");
        break;
      case Role::kOutcome:
        ++n_outcome;
        outcome_ = i;
        if (c.kind != Kind::kNumeric) throw SchemaError("outcome column must be numeric");
        break;
      case Role::kSchoolId:
        ++n_school;
        school_ = i;
        break;
      case Role::kCovariate:
        covariates_.push_back(i);
        break;
    }
  }
  if (n_treatment != 1) throw SchemaError("schema needs exactly one treatment column");
  if (n_outcome != 1) throw SchemaError("schema needs exactly one outcome column");
  if (n_school != 1) throw SchemaError("schema needs exactly one school_id column");
  // School ids are always handled as labels.
  columns_[school_].kind = Kind::kCategorical;
  columns_[school_].level = Level::kSchool;
}

std::optional<std::size_t> Schema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(const std::string& name) const {
  if (auto i = find(name)) return *i;
  throw SchemaError("unknown column '" + name + "'");
}

std::vector<std::string> Schema::covariate_names() const {
  std::vector<std::string> out;
  for (auto i : covariates_) out.push_back(columns_[i].name);
  return out;
}

nlohmann::json Schema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"name", c.name},
                    {"level", to_string(c.level)},
                    {"kind", to_string(c.kind)},
                    {"role", to_string(c.role)}});
  }
  return {{"columns", cols}};
}

Schema Schema::from_json(const nlohmann::json& j) {
  if (!j.contains("columns") || !j.at("columns").is_array()) {
    throw SchemaError("schema document needs a 'columns' array");
  }
  std::vector<ColumnSpec> cols;
  for (const auto& c : j.at("columns")) {
    ColumnSpec spec;
    if (!c.contains("name")) throw SchemaError("column missing 'name'");
    spec.name = c.at("name").get<std::string>();
    spec.role = c.contains("role")
                    ? parse_enum<Role>(c, "role",
                                       {{"covariate", Role::kCovariate},
                                        {"treatment", Role::kTreatment},
                                        {"outcome", Role::kOutcome},
                                        {"school_id", Role::kSchoolId}})
                    : Role::kCovariate;
    spec.level = c.contains("level")
                     ? parse_enum<Level>(c, "level", {{"student", Level::kStudent},
                                                      {"school", Level::kSchool}})
                     : Level::kStudent;
    spec.kind = c.contains("kind")
                    ? parse_enum<Kind>(c, "kind", {{"numeric", Kind::kNumeric},
                                                   {"categorical", Kind::kCategorical}})
                    : (spec.role == Role::kSchoolId ? Kind::kCategorical : Kind::kNumeric);
    cols.push_back(std::move(spec));
  }
  return Schema(std::move(cols));
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("schema file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

bool Schema::operator==(const Schema& other) const {
  if (columns_.size() != other.columns_.size()) return false;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& a = columns_[i];
    const auto& b = other.columns_[i];
    if (a.name != b.name || a.level != b.level || a.kind != b.kind || a.role != b.role) {
      return false;
    }
  }
  return true;
}

Dataset::Dataset(Schema schema, std::vector<Column> columns,
                 std::vector<std::int64_t> row_ids)
    : schema_(std::move(schema)), columns_(std::move(columns)), row_ids_(std::move(row_ids)) {
  if (columns_.size() != schema_.size()) {
    throw SchemaError("dataset has " + std::to_string(columns_.size()) +
                      " columns but schema declares " + std::to_string(schema_.size()));
  }
  const std::size_t m = columns_[schema_.treatment_column()].numbers.size();
  if (m == 0) throw ValidationError("dataset must contain at least one row");
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& spec = schema_.column(c);
    const std::size_t len = spec.kind == Kind::kNumeric ? columns_[c].numbers.size()
                                                        : columns_[c].labels.size();
    if (len != m) {
      throw ValidationError("column '" + spec.name + "' has " + std::to_string(len) +
                            " values, expected " + std::to_string(m));
    }
  }
  if (row_ids_.empty()) {
    row_ids_.resize(m);
    for (std::size_t i = 0; i < m; ++i) row_ids_[i] = static_cast<std::int64_t>(i);
  } else if (row_ids_.size() != m) {
    throw ValidationError("row id count does not match row count");
  }

  const auto& z = columns_[schema_.treatment_column()].numbers;
  const auto& y = columns_[schema_.outcome_column()].numbers;
  const auto& s = columns_[schema_.school_column()].labels;
  treatment_.resize(m);
  outcome_.resize(m);
  school_of_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (z[i] == 0.0) {
      treatment_[i] = 0;
    } else if (z[i] == 1.0) {
      treatment_[i] = 1;
    } else {
      throw ValidationError("row " + std::to_string(i + 1) + ": treatment must be 0 or 1");
    }
    if (!std::isfinite(y[i])) {
      throw ValidationError("row " + std::to_string(i + 1) + ": outcome is not finite");
    }
    outcome_[i] = y[i];
    if (s[i].empty()) {
      throw ValidationError("row " + std::to_string(i + 1) + ": missing school id");
    }
    auto [it, inserted] = school_lookup_.emplace(s[i], school_labels_.size());
    if (inserted) {
      school_labels_.push_back(s[i]);
      school_rows_.emplace_back();
    }
    school_of_[i] = it->second;
    school_rows_[it->second].push_back(i);
  }
}

std::optional<std::size_t> Dataset::find_school(const std::string& label) const {
  auto it = school_lookup_.find(label);
  if (it == school_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Dataset::group_rows(int z) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < treatment_.size(); ++i) {
    if (treatment_[i] == z) rows.push_back(i);
  }
  return rows;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const bool numeric = schema_.column(c).kind == Kind::kNumeric;
    auto& dst = cols[c];
    if (numeric) {
      dst.numbers.reserve(rows.size());
      for (auto r : rows) dst.numbers.push_back(columns_[c].numbers.at(r));
    } else {
      dst.labels.reserve(rows.size());
      for (auto r : rows) dst.labels.push_back(columns_[c].labels.at(r));
    }
  }
  std::vector<std::int64_t> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(row_ids_[r]);
  return Dataset(schema_, std::move(cols), std::move(ids));
}

Dataset Dataset::with_school_labels(std::vector<std::string> labels) const {
  auto cols = columns_;
  cols[schema_.school_column()].labels = std::move(labels);
  return Dataset(schema_, std::move(cols), row_ids_);
}

Dataset Dataset::with_outcomes(std::vector<double> outcomes) const {
  auto cols = columns_;
  cols[schema_.outcome_column()].numbers = std::move(outcomes);
  return Dataset(schema_, std::move(cols), row_ids_);
}

Dataset Dataset::with_treatments(std::vector<int> treatments) const {
  auto cols = columns_;
  auto& z = cols[schema_.treatment_column()].numbers;
  z.assign(treatments.begin(), treatments.end());
  return Dataset(schema_, std::move(cols), row_ids_);
}

}  // namespace hetfx
