// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetfx/dataset.h"
#include "hetfx/forest.h"
#include "hetfx/inference.h"
#include "hetfx/interpret.h"
#include "hetfx/splitting.h"
#include "hetfx/synthetic.h"
#include "json.hpp"

namespace hetfx {

struct DataSource {
  std::filesystem::path csv;
  std::filesystem::path schema;
  std::optional<SyntheticConfig> synthetic;
};

// One named estimator and its tuning grid. `family` is a base-learner
// family (T-learner) or "repnet". Each candidate is `params` overlaid with
// the candidate's keys.
struct EstimatorSpec {
  std::string name;
  std::string family;
  std::vector<nlohmann::json> candidates;
};

enum class BootstrapScope { kTrainOnly, kTrainAndValid };

struct BootstrapSettings {
  bool enabled = true;
  std::size_t B = 500;
  double level = 0.95;
  BootstrapScope scope = BootstrapScope::kTrainOnly;
};

struct InterpretSettings {
  bool enabled = true;
  std::string best;  // force this estimator; empty selects by validation R^2
  bool full_tree = true;
  std::size_t max_depth = 3;
  std::optional<LeafConstraints> constraints;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> stratify;  // empty: every covariate
  std::size_t n_bins = 5;
  Binning binning = Binning::kQuantile;
  // Shallow trees keep split counts on the dominant structure of tau_hat.
  ForestParams importance{.n_trees = 100, .tree = {.max_depth = 4, .min_leaf_rows = 100}};
};

struct DiagnosticsSettings {
  bool enabled = true;
  std::size_t n_bins = 20;
};

struct PipelineConfig {
  DataSource data;
  SplitParams split;
  std::vector<EstimatorSpec> estimators;
  BootstrapSettings bootstrap;
  InterpretSettings interpret;
  DiagnosticsSettings diagnostics;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "hetfx_out";
  bool save_models = false;

  // Relative paths resolve against `base_dir`. ConfigError on invalid input;
  // with `require_estimators` false an empty estimator list is accepted.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                                  bool require_estimators = true);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void validate() const;
};

// Data described by the config (CSV or generated).
Dataset load_pipeline_data(const PipelineConfig& config);

struct EstimatorOutcome {
  std::string name;
  std::string family;
  nlohmann::json selected;      // chosen candidate
  std::size_t selected_index = 0;
  std::vector<double> candidate_r2;
  double ate = 0.0;
  double r2 = 0.0;
  std::optional<BootstrapResult> ate_ci;
  std::optional<BootstrapResult> r2_ci;
  std::size_t validation_uses = 0;
};

struct RunReport {
  std::vector<EstimatorOutcome> estimators;
  double naive_ate = 0.0;
  std::optional<BootstrapResult> naive_ci;
  std::string best;
  nlohmann::json document;  // full report.json content
  nlohmann::json meta;      // run_meta.json (timings; not deterministic)
  std::vector<std::string> files;
};

struct SelectionRow {
  std::string estimator;
  double ate = 0.0;
  std::optional<std::pair<double, double>> ate_ci;
  std::optional<double> r2;
  std::optional<std::pair<double, double>> r2_ci;
};

// Naive row first, then one row per estimator.
std::vector<SelectionRow> selection_table(const RunReport& report);
std::string selection_table_csv(const std::vector<SelectionRow>& rows);

// Runs every stage and writes all artifacts under config.output_dir.
RunReport run_pipeline(const PipelineConfig& config);

// Balance diagnostics only; writes under <output_dir>/diagnostics.
nlohmann::json run_diagnostics(const PipelineConfig& config);

}  // namespace hetfx
