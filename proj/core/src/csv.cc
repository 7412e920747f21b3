// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hetfx/dataset.h"
#include "hetfx/errors.h"

namespace hetfx {
namespace {

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// embedded newlines are not supported.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Dataset read_csv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("input is empty; header row required");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  auto header = split_record(line);
  for (auto& h : header) h = trim(h);

  // file column -> schema column
  std::vector<std::size_t> mapping(header.size());
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t f = 0; f < header.size(); ++f) {
    auto idx = schema.find(header[f]);
    if (!idx) throw SchemaError("header column '" + header[f] + "' is not in the schema");
    if (seen[*idx]) throw SchemaError("header column '" + header[f] + "' appears twice");
    seen[*idx] = true;
    mapping[f] = *idx;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!seen[c]) throw SchemaError("missing column '" + schema.column(c).name + "'");
  }

  std::vector<Column> cols(schema.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::size_t c = mapping[f];
      const auto& spec = schema.column(c);
      std::string value = trim(fields[f]);
      if (spec.kind == Kind::kCategorical) {
        if (value.empty() && spec.role == Role::kSchoolId) {
          throw ValidationError("row " + std::to_string(row) + ": missing school id");
        }
        cols[c].labels.push_back(std::move(value));
        continue;
      }
      double v = 0.0;
      const char* begin = value.data();
      const char* end = value.data() + value.size();
      if (!value.empty() && *begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (value.empty() || ec != std::errc() || ptr != end) {
        throw ValidationError("row " + std::to_string(row) + ": column '" + spec.name +
                              "' value '" + value + "' is not a number");
      }
      if (spec.role == Role::kTreatment && v != 0.0 && v != 1.0) {
        throw ValidationError("row " + std::to_string(row) + ": treatment value '" + value +
                              "' is not 0 or 1");
      }
      if (spec.role == Role::kOutcome && !std::isfinite(v)) {
        throw ValidationError("row " + std::to_string(row) + ": outcome is not finite");
      }
      cols[c].numbers.push_back(v);
    }
  }
  if (row == 0) throw ValidationError("input has a header but no data rows");
  return Dataset(schema, std::move(cols));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, schema);
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  const auto& schema = dataset.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out << ',';
    out << quote_if_needed(schema.column(c).name);
  }
  out << '\n';
  for (std::size_t r = 0; r < dataset.num_rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out << ',';
      const auto& col = dataset.column(c);
      if (schema.column(c).kind == Kind::kNumeric) {
        out << format_double(col.numbers[r]);
      } else {
        out << quote_if_needed(col.labels[r]);
      }
    }
    out << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(dataset, out);
}

}  // namespace hetfx
