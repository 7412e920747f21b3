// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/cate_table.h"

#include <fstream>
#include <ostream>

#include "hetfx/dataset.h"
#include "hetfx/errors.h"

namespace hetfx {

void write_cate_csv(const CateTable& table, std::ostream& out) {
  out << "row_id,school_id,tau_hat,model_id\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.row_ids[i] << ',' << table.school_ids[i] << ',' << format_double(table.tau_hat[i])
        << ',' << table.model_id << '\n';
  }
}

void write_cate_csv(const CateTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_cate_csv(table, out);
}

}  // namespace hetfx
