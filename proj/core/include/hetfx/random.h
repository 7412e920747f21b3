// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <random>

namespace hetfx {

// Mixes a parent seed with a stream index into an independent child seed
// (splitmix64 finalizer). Used everywhere a per-tree, per-replicate or
// per-candidate substream is needed so results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

// Uniform integer in [0, n). n must be > 0.
std::size_t uniform_index(Engine& engine, std::size_t n);

}  // namespace hetfx
