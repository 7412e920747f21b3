// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

// hetfx command line: run the full pipeline, generate synthetic data, or
// print balance diagnostics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hetfx/errors.h"
#include "hetfx/parallel.h"
#include "hetfx/pipeline.h"
#include "hetfx/synthetic.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw hetfx::IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw hetfx::ConfigError(path.string() + ": " + e.what());
  }
}

void write_error(const fs::path& dir, const hetfx::Error* err, const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "error.json", std::ios::binary);
  if (!out) return;
  out << json{{"status", "failed"}, {"kind", err ? err->kind() : "internal"}, {"message", message}}.dump(2) << "\n";
}

int exit_code(const hetfx::Error* err) {
  if (!err) return 1;
  const std::string kind = err->kind();
  return kind == "config" || kind == "argument" || kind == "schema" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetfx: heterogeneous treatment effect estimation for clustered data"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: HETFX_THREADS or all cores)");

  auto* run = app.add_subcommand("run", "Split, fit, bootstrap, interpret and diagnose");
  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::string run_out;
  run->add_option("--config", run_config, "Pipeline config (JSON)")->required();
  run->add_option("--seed", run_seed, "Override the run seed");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--threads", threads, "Worker threads");

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
  std::string synth_config, synth_out, synth_truth;
  synth->add_option("--config", synth_config, "Synthetic generator config, or a pipeline config")->required();
  synth->add_option("--out", synth_out, "CSV path")->required();
  synth->add_option("--truth", synth_truth, "Also write tau, mu0 and propensity per row");

  auto* diagnose = app.add_subcommand("diagnose", "Covariate balance diagnostics");
  std::string diag_config, diag_out;
  diagnose->add_option("--config", diag_config, "Pipeline config (JSON)")->required();
  diagnose->add_option("--out", diag_out, "Output directory");
  diagnose->add_option("--threads", threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) hetfx::set_num_threads(threads);

  fs::path error_dir = ".";
  try {
    if (*run) {
      json j = read_json(run_config);
      if (run_seed) j["seed"] = *run_seed;
      if (!run_out.empty()) j["output_dir"] = fs::absolute(run_out).string();
      error_dir = j.value("output_dir", std::string("hetfx_out"));
      if (error_dir.is_relative()) error_dir = fs::path(run_config).parent_path() / error_dir;
      const auto config = hetfx::PipelineConfig::from_json(j, fs::path(run_config).parent_path());
      const auto report = hetfx::run_pipeline(config);
      std::cout << hetfx::selection_table_csv(hetfx::selection_table(report));
      std::cout << "best estimator: " << report.best << "\n";
      std::cout << "outputs: " << config.output_dir.string() << "\n";
    } else if (*synth) {
      const json j = read_json(synth_config);
      hetfx::SyntheticConfig cfg;
      try {
        cfg = j.contains("data") ? hetfx::SyntheticConfig::from_json(j.at("data").at("synthetic"))
                                 : hetfx::SyntheticConfig::from_json(j);
      } catch (const json::exception& e) {
        throw hetfx::ConfigError(std::string("synthetic config: ") + e.what());
      }
      const auto data = hetfx::generate_synthetic(cfg);
      hetfx::write_csv(data.dataset, synth_out);
      fs::path schema_path = synth_out;
      schema_path.replace_extension(".schema.json");
      std::ofstream(schema_path, std::ios::binary) << data.dataset.schema().to_json().dump(2) << "\n";
      if (!synth_truth.empty()) {
        std::ofstream out(synth_truth, std::ios::binary);
        if (!out) throw hetfx::IoError("cannot open " + synth_truth);
        out << "row_id,tau,mu0,propensity\n";
        for (std::size_t i = 0; i < data.dataset.num_rows(); ++i) {
          out << data.dataset.row_id(i) << ',' << hetfx::format_double(data.truth.tau[i]) << ','
              << hetfx::format_double(data.truth.mu0[i]) << ',' << hetfx::format_double(data.truth.propensity[i])
              << '\n';
        }
      }
      std::cout << "wrote " << data.dataset.num_rows() << " rows in " << data.dataset.num_schools()
                << " schools to " << synth_out << " (schema: " << schema_path.string() << ")\n";
    } else if (*diagnose) {
      json j = read_json(diag_config);
      if (!diag_out.empty()) j["output_dir"] = fs::absolute(diag_out).string();
      const auto config = hetfx::PipelineConfig::from_json(j, fs::path(diag_config).parent_path(), false);
      error_dir = config.output_dir;
      std::cout << hetfx::run_diagnostics(config).dump(2) << "\n";
    }
  } catch (const hetfx::Error& e) {
    write_error(error_dir, &e, e.what());
    std::cerr << "hetfx: " << e.kind() << " error: " << e.what() << "\n";
    return exit_code(&e);
  } catch (const std::exception& e) {
    write_error(error_dir, nullptr, e.what());
    std::cerr << "hetfx: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
