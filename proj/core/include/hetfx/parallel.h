// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstddef>
#include <functional>

namespace hetfx {

// Process-wide worker count used by parallel_for. 0 means "use
// HETFX_THREADS if set, else hardware concurrency".
void set_num_threads(std::size_t n);
std::size_t num_threads();

// Runs body(i) for i in [0, n). Work items must write only to their own
// slots; reductions happen afterwards in index order. If any item throws,
// the exception of the lowest failing index is rethrown after all workers
// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hetfx
