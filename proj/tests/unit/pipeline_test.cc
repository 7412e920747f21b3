// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetfx/errors.h"
#include "hetfx/pipeline.h"

namespace hetfx {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json small_config(const fs::path& out) {
  return json{
      {"seed", 5},
      {"output_dir", out.string()},
      {"data",
       {{"synthetic",
         {{"n_schools", 24}, {"students_per_school", 40}, {"effect", {{"kind", "constant"}, {"value", 0.26}}},
          {"noise_sd", 0.5}, {"seed", 3}}}}},
      {"split", {{"n_candidates", 200}}},
      {"estimators",
       json::array({{{"name", "ridge"}, {"family", "ridge"},
                     {"candidates", json::array({{{"lambda", 0.01}}, {{"lambda", 100.0}}})}}})},
      {"bootstrap", {{"B", 20}}},
      {"interpret", {{"pairs", json::array({json::array({"X1", "X2"})})}, {"stratify", {"XC", "S3"}},
                     {"min_schools", 5}, {"min_students", 50},
                     {"importance", {{"n_trees", 10}}}}},
  };
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(PipelineConfig, EmptyEstimatorListIsConfigError) {
  json j = small_config("x");
  j["estimators"] = json::array();
  EXPECT_THROW(PipelineConfig::from_json(j), ConfigError);
  EXPECT_NO_THROW(PipelineConfig::from_json(j, {}, false));
}

TEST(PipelineConfig, InvalidValuesAreConfigErrors) {
  for (auto patch : {json{{"split", {{"train_frac", 1.5}}}}, json{{"bootstrap", {{"level", 1.0}}}},
                     json{{"estimators", json::array({{{"family", "banana"}}})}}}) {
    json j = small_config("x");
    j.merge_patch(patch);
    EXPECT_THROW(PipelineConfig::from_json(j), ConfigError) << patch.dump();
  }
}

TEST(PipelineConfig, DefaultsAndRoundTrip) {
  const PipelineConfig c = PipelineConfig::from_json(small_config("x"));
  EXPECT_EQ(c.split.train_frac, 0.8);
  EXPECT_EQ(c.split.treatment_weight, 10.0);
  EXPECT_EQ(c.bootstrap.level, 0.95);
  EXPECT_EQ(c.interpret.max_depth, 3u);
  ASSERT_EQ(c.estimators.size(), 1u);
  EXPECT_EQ(c.estimators[0].candidates.size(), 2u);
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(SelectionTable, NaiveRowFirstWithoutR2) {
  RunReport r;
  r.naive_ate = 0.5;
  BootstrapResult ci;
  ci.ci_low = 0.1;
  ci.ci_high = 0.9;
  r.naive_ci = ci;
  EstimatorOutcome e;
  e.name = "ridge";
  e.ate = 0.25;
  e.r2 = 0.3;
  e.ate_ci = ci;
  e.r2_ci = ci;
  r.estimators.push_back(e);
  const auto rows = selection_table(r);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].estimator, "naive");
  EXPECT_FALSE(rows[0].r2.has_value());
  EXPECT_TRUE(rows[1].r2.has_value());
  for (const auto& row : rows) {
    if (row.ate_ci) {
      EXPECT_LE(row.ate_ci->first, row.ate_ci->second);
    }
  }
  const std::string csv = selection_table_csv(rows);
  EXPECT_EQ(csv,
            "estimator,ATE,ATE CI,R2,R2 CI\n"
            "naive,0.500,\"[0.100, 0.900]\",,\n"
            "ridge,0.250,\"[0.100, 0.900]\",0.300,\"[0.100, 0.900]\"\n");
}

TEST(Pipeline, ConstantEffectRidgeRunEndToEnd) {
  const fs::path out = fresh_dir("hetfx_pipeline_e2e");
  json cfg = small_config(out);
  cfg["data"]["synthetic"]["n_schools"] = 40;
  cfg["data"]["synthetic"]["students_per_school"] = 100;
  cfg["bootstrap"]["B"] = 200;
  const RunReport r = run_pipeline(PipelineConfig::from_json(cfg));
  ASSERT_EQ(r.estimators.size(), 1u);
  const auto& e = r.estimators[0];
  EXPECT_EQ(e.candidate_r2.size(), 2u);
  EXPECT_EQ(e.validation_uses, 2u);
  ASSERT_TRUE(e.ate_ci.has_value());
  EXPECT_LE(e.ate_ci->ci_low, 0.26);
  EXPECT_GE(e.ate_ci->ci_high, 0.26);
  EXPECT_EQ(r.best, "ridge");
  // every referenced file exists and parses
  for (const auto& f : r.files) {
    const fs::path p = out / f;
    ASSERT_TRUE(fs::exists(p)) << f;
    if (p.extension() == ".json") {
      EXPECT_NO_THROW({ const json parsed = json::parse(slurp(p)); (void)parsed; }) << f;
    }
  }
  const json report = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report.at("files").size(), r.files.size());
  const std::string results = slurp(out / "results.csv");
  EXPECT_EQ(results.rfind("estimator,ATE,ATE CI,R2,R2 CI\nnaive,", 0), 0u);
  // histogram mass concentrated near the constant
  std::istringstream hist(slurp(out / "cate_histogram.csv"));
  std::string line;
  std::getline(hist, line);
  double total = 0, near = 0;
  while (std::getline(hist, line)) {
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    const double mid = 0.5 * (std::stod(a) + std::stod(b)), count = std::stod(c);
    total += count;
    if (std::abs(mid - 0.26) <= 0.2) near += count;
  }
  EXPECT_GE(near / total, 0.95);
}

TEST(Pipeline, RepeatedRunsAreByteIdentical) {
  const fs::path a = fresh_dir("hetfx_pipeline_a"), b = fresh_dir("hetfx_pipeline_b");
  json cfg = small_config(a);
  cfg["estimators"].push_back({{"name", "tarnet"}, {"family", "repnet"},
                               {"params", {{"epochs", 3}, {"rep_layers", {8}}, {"head_layers", {4}}}}});
  const RunReport ra = run_pipeline(PipelineConfig::from_json(cfg));
  cfg["output_dir"] = b.string();
  run_pipeline(PipelineConfig::from_json(cfg));
  for (const auto& f : ra.files) {
    if (f == "run_meta.json") continue;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Pipeline, DiagnoseOnlyNeedsData) {
  json cfg = small_config(fresh_dir("hetfx_pipeline_diag"));
  cfg.erase("estimators");
  const json summary = run_diagnostics(PipelineConfig::from_json(cfg, {}, false));
  EXPECT_TRUE(summary.contains("group_mmd2") || summary.contains("mmd"));
}

}  // namespace
}  // namespace hetfx
