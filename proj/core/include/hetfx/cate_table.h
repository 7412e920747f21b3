// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hetfx {

// Per-row imputed effects with the provenance needed for aggregation.
struct CateTable {
  std::vector<std::int64_t> row_ids;
  std::vector<std::string> school_ids;
  std::vector<double> tau_hat;
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;  // 0 is the point estimate

  std::size_t size() const { return tau_hat.size(); }
};

// Columns: row_id, school_id, tau_hat, model_id.
void write_cate_csv(const CateTable& table, std::ostream& out);
void write_cate_csv(const CateTable& table, const std::filesystem::path& path);

}  // namespace hetfx
