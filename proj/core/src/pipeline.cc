// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/pipeline.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "hetfx/diagnostics.h"
#include "hetfx/encoding.h"
#include "hetfx/errors.h"
#include "hetfx/learners.h"
#include "hetfx/parallel.h"
#include "hetfx/random.h"
#include "hetfx/repnet.h"
#include "hetfx/tlearner.h"

namespace hetfx {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Substream tags of the run seed.
enum Stream : std::uint64_t { kSplitStream = 1, kFitStream = 2, kBootstrapStream = 3, kInterpretStream = 4 };

const std::size_t kHistogramBins = 50;
const std::size_t kGridPoints = 50;

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
}

std::string scope_name(BootstrapScope s) { return s == BootstrapScope::kTrainOnly ? "train_only" : "train_and_valid"; }

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  return s == "-0.000" ? "0.000" : s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

// An estimator candidate fitted on one training set.
OutcomePairModel fit_candidate(const EstimatorSpec& spec, const json& candidate, const Dataset& train,
                               std::uint64_t seed) {
  if (spec.family == "repnet") {
    RepNetConfig cfg = RepNetConfig::from_json(candidate);
    cfg.seed = seed;
    return make_repnet_pair(repnet_fit(train, cfg), spec.name, seed);
  }
  json j = candidate;
  j["family"] = spec.family;
  OutcomePairModel m = fit_t_learner(train, EstimatorConfig::from_json(j), seed);
  m.model_id = spec.name;
  return m;
}

json estimator_outcome_json(const EstimatorOutcome& e) {
  json j = {{"name", e.name},
            {"family", e.family},
            {"selected", e.selected},
            {"selected_index", e.selected_index},
            {"candidate_valid_r2", e.candidate_r2},
            {"validation_uses", e.validation_uses},
            {"ate", e.ate},
            {"valid_r2", e.r2}};
  if (e.ate_ci) j["ate_bootstrap"] = e.ate_ci->to_json();
  if (e.r2_ci) j["r2_bootstrap"] = e.r2_ci->to_json();
  return j;
}

std::string histogram_csv(const std::vector<double>& values, std::size_t bins) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const std::size_t k = hi > lo ? bins : 1;
  std::vector<std::size_t> counts(k, 0);
  for (double v : values) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    ++counts[std::min(k - 1, static_cast<std::size_t>(std::floor(t * static_cast<double>(k))))];
  }
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < k; ++b) {
    const double a = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(k);
    const double c = b + 1 == k ? hi : lo + (hi - lo) * static_cast<double>(b + 1) / static_cast<double>(k);
    out += format_double(a) + "," + format_double(c) + "," + std::to_string(counts[b]) + "\n";
  }
  return out;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

// ---- configuration -------------------------------------------------------

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir, bool require_estimators) {
  PipelineConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    c.save_models = j.value("save_models", c.save_models);

    const json& data = j.at("data");
    if (data.contains("synthetic")) {
      c.data.synthetic = SyntheticConfig::from_json(data.at("synthetic"));
    } else {
      c.data.csv = resolve(base_dir, data.at("csv").get<std::string>());
      c.data.schema = resolve(base_dir, data.at("schema").get<std::string>());
    }

    const json split = j.value("split", json::object());
    c.split.train_frac = split.value("train_frac", c.split.train_frac);
    c.split.n_candidates = split.value("n_candidates", c.split.n_candidates);
    c.split.treatment_weight = split.value("treatment_weight", c.split.treatment_weight);
    c.split.seed = split.value("seed", derive_seed(c.seed, kSplitStream));
    const std::string weighting = split.value("moment_weighting", std::string("student"));
    if (weighting == "student") {
      c.split.moment_weighting = MomentWeighting::kStudent;
    } else if (weighting == "school") {
      c.split.moment_weighting = MomentWeighting::kSchool;
    } else {
      throw ConfigError("split.moment_weighting must be student or school");
    }

    for (const json& e : j.value("estimators", json::array())) {
      EstimatorSpec spec;
      spec.family = e.at("family").get<std::string>();
      spec.name = e.value("name", spec.family);
      const json base = e.value("params", json::object());
      const json grid = e.value("candidates", json::array({json::object()}));
      for (const json& cand : grid) {
        json merged = base;
        merged.update(cand);
        spec.candidates.push_back(std::move(merged));
      }
      c.estimators.push_back(std::move(spec));
    }

    const json boot = j.value("bootstrap", json::object());
    c.bootstrap.enabled = boot.value("enabled", c.bootstrap.enabled);
    c.bootstrap.B = boot.value("B", c.bootstrap.B);
    c.bootstrap.level = boot.value("level", c.bootstrap.level);
    const std::string scope = boot.value("scope", std::string("train_only"));
    if (scope == "train_only") {
      c.bootstrap.scope = BootstrapScope::kTrainOnly;
    } else if (scope == "train_and_valid") {
      c.bootstrap.scope = BootstrapScope::kTrainAndValid;
    } else {
      throw ConfigError("bootstrap.scope must be train_only or train_and_valid");
    }

    const json in = j.value("interpret", json::object());
    c.interpret.enabled = in.value("enabled", c.interpret.enabled);
    c.interpret.best = in.value("best", c.interpret.best);
    c.interpret.full_tree = in.value("full_tree", c.interpret.full_tree);
    c.interpret.max_depth = in.value("max_depth", c.interpret.max_depth);
    if (in.contains("min_schools") || in.contains("min_students")) {
      LeafConstraints lc;
      lc.min_schools = in.value("min_schools", lc.min_schools);
      lc.min_students = in.value("min_students", lc.min_students);
      c.interpret.constraints = lc;
    }
    for (const json& p : in.value("pairs", json::array())) {
      c.interpret.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
    if (in.contains("stratify")) c.interpret.stratify = in.at("stratify").get<std::vector<std::string>>();
    c.interpret.n_bins = in.value("n_bins", c.interpret.n_bins);
    if (in.contains("binning")) c.interpret.binning = binning_from_string(in.at("binning").get<std::string>());
    if (in.contains("importance")) {
      c.interpret.importance = ForestParams::from_json(in.at("importance"), c.interpret.importance);
    }

    const json diag = j.value("diagnostics", json::object());
    c.diagnostics.enabled = diag.value("enabled", c.diagnostics.enabled);
    c.diagnostics.n_bins = diag.value("n_bins", c.diagnostics.n_bins);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  if (require_estimators || !c.estimators.empty()) c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
  if (estimators.empty()) throw ConfigError("config lists no estimators");
  std::map<std::string, int> names;
  for (const auto& e : estimators) {
    if (e.candidates.empty()) throw ConfigError("estimator '" + e.name + "' has no candidates");
    if (++names[e.name] > 1) throw ConfigError("duplicate estimator name '" + e.name + "'");
    try {
      for (const auto& cand : e.candidates) {
        if (e.family == "repnet") {
          RepNetConfig::from_json(cand);
        } else {
          json j = cand;
          j["family"] = e.family;
          EstimatorConfig::from_json(j);
        }
      }
    } catch (const Error& err) {
      throw ConfigError("estimator '" + e.name + "': " + err.what());
    }
  }
  if (!(split.train_frac > 0.0 && split.train_frac < 1.0)) throw ConfigError("split.train_frac must be in (0, 1)");
  if (split.n_candidates < 1) throw ConfigError("split.n_candidates must be >= 1");
  if (bootstrap.enabled && bootstrap.B < 1) throw ConfigError("bootstrap.B must be >= 1");
  if (!(bootstrap.level > 0.0 && bootstrap.level < 1.0)) throw ConfigError("bootstrap.level must be in (0, 1)");
  if (!interpret.best.empty() && !names.count(interpret.best)) {
    throw ConfigError("interpret.best names unknown estimator '" + interpret.best + "'");
  }
  if (interpret.n_bins < 1) throw ConfigError("interpret.n_bins must be >= 1");
  if (diagnostics.n_bins < 1) throw ConfigError("diagnostics.n_bins must be >= 1");
}

json PipelineConfig::to_json() const {
  json data;
  if (this->data.synthetic) {
    data["synthetic"] = this->data.synthetic->to_json();
  } else {
    data["csv"] = this->data.csv.string();
    data["schema"] = this->data.schema.string();
  }
  json est = json::array();
  for (const auto& e : estimators) est.push_back({{"name", e.name}, {"family", e.family}, {"candidates", e.candidates}});
  json pairs = json::array();
  for (const auto& [a, b] : interpret.pairs) pairs.push_back({a, b});
  json in = {{"enabled", interpret.enabled},
             {"best", interpret.best},
             {"full_tree", interpret.full_tree},
             {"max_depth", interpret.max_depth},
             {"pairs", pairs},
             {"stratify", interpret.stratify},
             {"n_bins", interpret.n_bins},
             {"binning", to_string(interpret.binning)},
             {"importance", interpret.importance.to_json()}};
  if (interpret.constraints) {
    in["min_schools"] = interpret.constraints->min_schools;
    in["min_students"] = interpret.constraints->min_students;
  }
  return {{"seed", seed},
          {"save_models", save_models},
          {"data", data},
          {"split",
           {{"train_frac", split.train_frac},
            {"n_candidates", split.n_candidates},
            {"treatment_weight", split.treatment_weight},
            {"seed", split.seed},
            {"moment_weighting", split.moment_weighting == MomentWeighting::kStudent ? "student" : "school"}}},
          {"estimators", est},
          {"bootstrap",
           {{"enabled", bootstrap.enabled},
            {"B", bootstrap.B},
            {"level", bootstrap.level},
            {"scope", scope_name(bootstrap.scope)}}},
          {"interpret", in},
          {"diagnostics", {{"enabled", diagnostics.enabled}, {"n_bins", diagnostics.n_bins}}}};
}

Dataset load_pipeline_data(const PipelineConfig& config) {
  if (config.data.synthetic) return generate_synthetic(*config.data.synthetic).dataset;
  return load_csv(config.data.csv, Schema::load(config.data.schema));
}

// ---- results table -------------------------------------------------------

std::vector<SelectionRow> selection_table(const RunReport& report) {
  std::vector<SelectionRow> rows;
  SelectionRow naive;
  naive.estimator = "naive";
  naive.ate = report.naive_ate;
  if (report.naive_ci) naive.ate_ci = std::make_pair(report.naive_ci->ci_low, report.naive_ci->ci_high);
  rows.push_back(naive);
  for (const auto& e : report.estimators) {
    SelectionRow r;
    r.estimator = e.name;
    r.ate = e.ate;
    r.r2 = e.r2;
    if (e.ate_ci) r.ate_ci = std::make_pair(e.ate_ci->ci_low, e.ate_ci->ci_high);
    if (e.r2_ci) r.r2_ci = std::make_pair(e.r2_ci->ci_low, e.r2_ci->ci_high);
    rows.push_back(r);
  }
  return rows;
}

std::string selection_table_csv(const std::vector<SelectionRow>& rows) {
  auto interval = [](const std::optional<std::pair<double, double>>& ci) {
    return ci ? "[" + fixed3(ci->first) + ", " + fixed3(ci->second) + "]" : std::string();
  };
  std::string out = "estimator,ATE,ATE CI,R2,R2 CI\n";
  for (const auto& r : rows) {
    out += csv_field(r.estimator) + "," + fixed3(r.ate) + "," + csv_field(interval(r.ate_ci)) + "," +
           (r.r2 ? fixed3(*r.r2) : std::string()) + "," + csv_field(interval(r.r2_ci)) + "\n";
  }
  return out;
}

// ---- pipeline ------------------------------------------------------------

RunReport run_pipeline(const PipelineConfig& config) {
  config.validate();
  Stopwatch clock;
  json timings;
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  RunReport report;
  auto record = [&](const std::string& rel) { report.files.push_back(rel); };

  write_json(out / "config.json", config.to_json());
  record("config.json");

  const Dataset data = load_pipeline_data(config);
  timings["load"] = clock.lap();

  // Step 1: school-level balanced split.
  const SplitAssignment split = balanced_split(data, config.split);
  const auto train_rows = split.train_rows(data);
  const auto valid_rows = split.valid_rows(data);
  const Dataset train = data.select_rows(train_rows);
  const Dataset valid = data.select_rows(valid_rows);
  write_json(out / "split.json", split.to_json(data));
  record("split.json");
  timings["split"] = clock.lap();

  // Step 2: fit every candidate on D_t, score on D_v, keep the best.
  struct Job {
    std::size_t estimator;
    std::size_t candidate;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < config.estimators.size(); ++e) {
    for (std::size_t k = 0; k < config.estimators[e].candidates.size(); ++k) jobs.push_back({e, k});
  }
  std::vector<std::uint64_t> fit_seeds(config.estimators.size());
  for (std::size_t e = 0; e < fit_seeds.size(); ++e) fit_seeds[e] = derive_seed(config.seed, kFitStream, e);
  std::vector<std::optional<OutcomePairModel>> models(jobs.size());
  std::vector<double> scores(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& spec = config.estimators[jobs[i].estimator];
    models[i] = fit_candidate(spec, spec.candidates[jobs[i].candidate], train, fit_seeds[jobs[i].estimator]);
    scores[i] = r2_heldout(*models[i], valid);
  });

  std::vector<OutcomePairModel> selected;
  std::vector<CateTable> cates;
  for (std::size_t e = 0; e < config.estimators.size(); ++e) {
    const auto& spec = config.estimators[e];
    EstimatorOutcome eo;
    eo.name = spec.name;
    eo.family = spec.family;
    std::optional<std::size_t> best_job;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].estimator != e) continue;
      eo.candidate_r2.push_back(scores[i]);
      ++eo.validation_uses;
      if (!best_job || scores[i] > scores[*best_job]) best_job = i;
    }
    eo.selected_index = jobs[*best_job].candidate;
    eo.selected = spec.candidates[eo.selected_index];
    eo.r2 = scores[*best_job];
    selected.push_back(std::move(*models[*best_job]));
    cates.push_back(impute_cate(selected.back(), data));
    eo.ate = ate(cates.back());
    report.estimators.push_back(std::move(eo));
  }
  models.clear();
  timings["fit"] = clock.lap();

  fs::create_directories(out / "cate");
  for (std::size_t e = 0; e < cates.size(); ++e) {
    const std::string rel = "cate/" + safe_name(report.estimators[e].name) + ".csv";
    write_cate_csv(cates[e], out / rel);
    record(rel);
  }
  if (config.save_models) {
    fs::create_directories(out / "models");
    for (std::size_t e = 0; e < selected.size(); ++e) {
      const std::string rel = "models/" + safe_name(report.estimators[e].name) + ".json";
      write_json(out / rel, selected[e].to_json());
      record(rel);
    }
  }

  // Naive difference in means.
  report.naive_ate = naive_ate(data);

  // Uncertainty: refit the selected configurations on school resamples of D_t.
  if (config.bootstrap.enabled) {
    const std::uint64_t boot_seed = derive_seed(config.seed, kBootstrapStream);
    std::vector<double> points;
    for (const auto& eo : report.estimators) {
      points.push_back(eo.ate);
      points.push_back(eo.r2);
    }
    const auto results = cluster_bootstrap_replicates(
        train, points,
        [&](const SchoolResample& rs, std::size_t k) {
          const Dataset* score_on = &valid;
          Dataset valid_resample;
          if (config.bootstrap.scope == BootstrapScope::kTrainAndValid) {
            valid_resample = resample_schools(valid, derive_seed(boot_seed, 1), k).dataset;
            score_on = &valid_resample;
          }
          std::vector<double> v;
          for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            const auto& eo = report.estimators[e];
            const OutcomePairModel m = fit_candidate(config.estimators[e], eo.selected, rs.dataset, fit_seeds[e]);
            v.push_back(ate(impute_cate(m, data)));
            v.push_back(r2_heldout(m, *score_on));
          }
          return v;
        },
        config.bootstrap.B, config.bootstrap.level, boot_seed);
    for (std::size_t e = 0; e < report.estimators.size(); ++e) {
      report.estimators[e].ate_ci = results[2 * e];
      report.estimators[e].r2_ci = results[2 * e + 1];
    }
    report.naive_ci = cluster_bootstrap(data, naive_ate, config.bootstrap.B, config.bootstrap.level,
                                        derive_seed(boot_seed, 2));
    timings["bootstrap"] = clock.lap();
  }

  write_text(out / "results.csv", selection_table_csv(selection_table(report)));
  record("results.csv");

  // Best model for Step 3.
  std::size_t best = 0;
  if (!config.interpret.best.empty()) {
    for (std::size_t e = 0; e < report.estimators.size(); ++e) {
      if (report.estimators[e].name == config.interpret.best) best = e;
    }
  } else {
    for (std::size_t e = 1; e < report.estimators.size(); ++e) {
      if (report.estimators[e].r2 > report.estimators[best].r2) best = e;
    }
  }
  report.best = report.estimators[best].name;
  const CateTable& best_cate = cates[best];
  write_text(out / "cate_histogram.csv", histogram_csv(best_cate.tau_hat, kHistogramBins));
  record("cate_histogram.csv");

  json doc;
  doc["dataset"] = {{"rows", data.num_rows()},
                    {"schools", data.num_schools()},
                    {"train_rows", train.num_rows()},
                    {"valid_rows", valid.num_rows()},
                    {"train_schools", split.train_schools.size()},
                    {"valid_schools", split.valid_schools.size()}};
  doc["split"] = {{"score", split.score}, {"chosen_candidate", split.chosen_candidate}};
  doc["naive_ate"] = report.naive_ate;
  if (report.naive_ci) doc["naive_bootstrap"] = report.naive_ci->to_json();
  doc["estimators"] = json::array();
  for (const auto& eo : report.estimators) doc["estimators"].push_back(estimator_outcome_json(eo));
  doc["best_estimator"] = report.best;
  doc["best_selected_by"] = config.interpret.best.empty() ? "validation_r2" : "config";

  if (config.interpret.enabled) {
    json interp;
    const FeatureMatrix fm = Encoder::fit(data).transform(data);
    ForestParams fp = config.interpret.importance;
    fp.seed = derive_seed(config.seed, kInterpretStream);
    const ImportanceReport importance = feature_importance(best_cate, fm, fp);
    write_json(out / "importance.json", importance.to_json());
    record("importance.json");
    interp["importance"] = "importance.json";

    std::vector<std::string> strat_cols = config.interpret.stratify;
    if (strat_cols.empty()) strat_cols = data.schema().covariate_names();
    json strata = json::array();
    for (const auto& col : strat_cols) {
      strata.push_back(stratify_cate(best_cate, data, col, config.interpret.n_bins, config.interpret.binning).to_json());
    }
    write_json(out / "stratification.json", strata);
    record("stratification.json");
    interp["stratification"] = "stratification.json";

    json trees = json::array();
    fs::create_directories(out / "trees");
    auto emit_tree = [&](const std::string& stem, const std::vector<std::string>& covs) {
      const InterpretTree tree =
          interpret_tree_fit(best_cate, data, covs, config.interpret.constraints, config.interpret.max_depth);
      write_json(out / "trees" / (stem + ".json"), tree.to_json());
      write_text(out / "trees" / (stem + ".txt"), rules_to_text(export_rules(tree)));
      record("trees/" + stem + ".json");
      record("trees/" + stem + ".txt");
      json entry = {{"name", stem}, {"covariates", covs}, {"file", "trees/" + stem + ".json"},
                    {"leaves", tree.tree.num_leaves()}};
      if (covs.size() == 2 && tree.encoder.width() == 2) {
        fs::create_directories(out / "grids");
        const std::string rel = "grids/" + stem + ".csv";
        write_pair_grid_csv(pair_grid(tree, data, kGridPoints), out / rel);
        record(rel);
        entry["grid"] = rel;
      }
      trees.push_back(std::move(entry));
    };
    if (config.interpret.full_tree) emit_tree("full_tree", data.schema().covariate_names());
    for (const auto& [a, b] : config.interpret.pairs) emit_tree("pair_" + safe_name(a) + "_" + safe_name(b), {a, b});
    interp["trees"] = trees;
    doc["interpret"] = interp;
    timings["interpret"] = clock.lap();
  }

  if (config.diagnostics.enabled) {
    fs::create_directories(out / "diagnostics");
    const BalanceReport balance = balance_report(data, config.diagnostics.n_bins);
    for (const auto& f : write_balance_report(balance, out / "diagnostics")) record("diagnostics/" + f);
    doc["diagnostics"] = {{"group_mmd2", balance.mmd.mmd2}, {"mmd_sigma", balance.mmd.sigma}, {"file", "diagnostics/balance.json"}};
    timings["diagnostics"] = clock.lap();
  }

  record("report.json");
  record("run_meta.json");
  doc["files"] = report.files;
  report.document = doc;
  write_json(out / "report.json", doc);

  report.meta = {{"seed", config.seed},
                 {"version", "0.1.0"},
                 {"threads", num_threads()},
                 {"output_dir", out.string()},
                 {"timings_seconds", timings}};
  write_json(out / "run_meta.json", report.meta);
  return report;
}

json run_diagnostics(const PipelineConfig& config) {
  const Dataset data = load_pipeline_data(config);
  const fs::path dir = config.output_dir / "diagnostics";
  fs::create_directories(dir);
  const BalanceReport balance = balance_report(data, config.diagnostics.n_bins);
  write_balance_report(balance, dir);
  json smd = json::object();
  for (const auto& [name, value] : balance.smd) smd[name] = value;
  return {{"rows", data.num_rows()},
          {"schools", data.num_schools()},
          {"group_mmd2", balance.mmd.mmd2},
          {"mmd_sigma", balance.mmd.sigma},
          {"smd", smd},
          {"output", dir.string()}};
}

}  // namespace hetfx
