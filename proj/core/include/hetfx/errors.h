// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <stdexcept>
#include <string>

namespace hetfx {

// Base class of every error raised by the library. The derived types mirror
// the failure classes of the public operations so callers (and the CLI's
// error summary) can tell them apart.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

#define HETFX_DEFINE_ERROR(Name, tag)                              \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(what) {}        \
    const char* kind() const noexcept override { return tag; }     \
  };

HETFX_DEFINE_ERROR(ArgumentError, "argument")
HETFX_DEFINE_ERROR(SchemaError, "schema")
HETFX_DEFINE_ERROR(ValidationError, "validation")
HETFX_DEFINE_ERROR(FitError, "fit")
HETFX_DEFINE_ERROR(TrainingError, "training")
HETFX_DEFINE_ERROR(MetricError, "metric")
HETFX_DEFINE_ERROR(AggregationError, "aggregation")
HETFX_DEFINE_ERROR(ConfigError, "config")
HETFX_DEFINE_ERROR(IoError, "io")

#undef HETFX_DEFINE_ERROR

}  // namespace hetfx
