// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {
namespace {

const std::vector<std::string> kStudentCovariates = {"S3", "C1", "C2", "C3"};
const std::vector<std::string> kSchoolNumeric = {"X1", "X2", "X3", "X4", "X5"};
const std::vector<std::string> kCategories = {"A", "B", "C", "D"};

struct Row {
  std::map<std::string, double> numeric;
  std::string category;
};

double term_value(const Row& row, const std::string& key) {
  const auto eq = key.find('=');
  if (eq != std::string::npos) {
    if (key.substr(0, eq) != "XC") throw ArgumentError("unknown indicator term '" + key + "'");
    return row.category == key.substr(eq + 1) ? 1.0 : 0.0;
  }
  auto it = row.numeric.find(key);
  if (it == row.numeric.end()) throw ArgumentError("unknown covariate '" + key + "'");
  return it->second;
}

double linear_form(const Row& row, double intercept, const std::map<std::string, double>& coefs) {
  double v = intercept;
  for (const auto& [name, c] : coefs) v += c * term_value(row, name);
  return v;
}

double effect_of(const EffectSpec& spec, const Row& row) {
  switch (spec.kind) {
    case EffectSpec::Kind::kConstant:
      return spec.value;
    case EffectSpec::Kind::kLinear:
      return linear_form(row, spec.value, spec.coefficients);
    case EffectSpec::Kind::kThreshold: {
      bool all = true;
      for (const auto& c : spec.conditions) {
        const double x = term_value(row, c.covariate);
        all = all && (c.greater ? x > c.threshold : x < c.threshold);
      }
      return spec.value + (all ? spec.delta : 0.0);
    }
  }
  return 0.0;
}

std::map<std::string, double> parse_terms(const nlohmann::json& j) {
  std::map<std::string, double> out;
  if (!j.is_object()) throw ArgumentError("coefficients must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
  return out;
}

}  // namespace

EffectSpec EffectSpec::constant(double c) {
  EffectSpec s;
  s.kind = Kind::kConstant;
  s.value = c;
  return s;
}

EffectSpec EffectSpec::linear(double intercept, std::map<std::string, double> coefficients) {
  EffectSpec s;
  s.kind = Kind::kLinear;
  s.value = intercept;
  s.coefficients = std::move(coefficients);
  return s;
}

EffectSpec EffectSpec::threshold(double base, double delta,
                                 std::vector<ThresholdCondition> conditions) {
  EffectSpec s;
  s.kind = Kind::kThreshold;
  s.value = base;
  s.delta = delta;
  s.conditions = std::move(conditions);
  return s;
}

SyntheticConfig SyntheticConfig::from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  try {
    c.n_schools = j.value("n_schools", c.n_schools);
    c.students_per_school = j.value("students_per_school", c.students_per_school);
    c.students_per_school_jitter = j.value("students_per_school_jitter", c.students_per_school_jitter);
    c.noise_sd = j.value("noise_sd", c.noise_sd);
    c.seed = j.value("seed", c.seed);
    if (j.contains("force_treatment")) c.force_treatment = j.at("force_treatment").get<int>();
    if (j.contains("effect")) {
      const auto& e = j.at("effect");
      const std::string kind = e.value("kind", std::string("constant"));
      if (kind == "constant") {
        c.effect = EffectSpec::constant(e.value("value", 0.0));
      } else if (kind == "linear") {
        c.effect = EffectSpec::linear(e.value("intercept", 0.0),
                                      e.contains("coefficients") ? parse_terms(e.at("coefficients"))
                                                                 : std::map<std::string, double>{});
      } else if (kind == "threshold") {
        std::vector<ThresholdCondition> conds;
        for (const auto& cj : e.at("conditions")) {
          const std::string op = cj.value("op", std::string("<"));
          if (op != "<" && op != ">") throw ArgumentError("threshold op must be '<' or '>'");
          conds.push_back({cj.at("covariate").get<std::string>(), op == ">",
                           cj.value("threshold", 0.0)});
        }
        c.effect = EffectSpec::threshold(e.value("base", 0.0), e.value("delta", 0.0), conds);
      } else {
        throw ArgumentError("unknown effect_spec kind '" + kind + "'");
      }
    }
    if (j.contains("baseline")) {
      const auto& b = j.at("baseline");
      c.baseline.intercept = b.value("intercept", c.baseline.intercept);
      if (b.contains("coefficients")) c.baseline.coefficients = parse_terms(b.at("coefficients"));
      c.baseline.school_effect_sd = b.value("school_effect_sd", c.baseline.school_effect_sd);
    }
    if (j.contains("propensity")) {
      const auto& p = j.at("propensity");
      const std::string kind = p.value("kind", std::string("constant"));
      if (kind == "constant") {
        c.propensity.kind = PropensitySpec::Kind::kConstant;
        c.propensity.value = p.value("value", 0.5);
      } else if (kind == "logistic") {
        c.propensity.kind = PropensitySpec::Kind::kLogistic;
        c.propensity.intercept = p.value("intercept", 0.0);
        if (p.contains("coefficients")) c.propensity.coefficients = parse_terms(p.at("coefficients"));
      } else {
        throw ArgumentError("unknown propensity kind '" + kind + "'");
      }
      c.propensity.overlap_bound = p.value("overlap_bound", c.propensity.overlap_bound);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("synthetic config: ") + e.what());
  }
  return c;
}

nlohmann::json SyntheticConfig::to_json() const {
  nlohmann::json e;
  switch (effect.kind) {
    case EffectSpec::Kind::kConstant:
      e = {{"kind", "constant"}, {"value", effect.value}};
      break;
    case EffectSpec::Kind::kLinear:
      e = {{"kind", "linear"}, {"intercept", effect.value}, {"coefficients", effect.coefficients}};
      break;
    case EffectSpec::Kind::kThreshold: {
      nlohmann::json conds = nlohmann::json::array();
      for (const auto& c : effect.conditions) {
        conds.push_back({{"covariate", c.covariate},
                         {"op", c.greater ? ">" : "<"},
                         {"threshold", c.threshold}});
      }
      e = {{"kind", "threshold"}, {"base", effect.value}, {"delta", effect.delta}, {"conditions", conds}};
      break;
    }
  }
  nlohmann::json p = {{"overlap_bound", propensity.overlap_bound}};
  if (propensity.kind == PropensitySpec::Kind::kConstant) {
    p["kind"] = "constant";
    p["value"] = propensity.value;
  } else {
    p["kind"] = "logistic";
    p["intercept"] = propensity.intercept;
    p["coefficients"] = propensity.coefficients;
  }
  nlohmann::json j = {{"n_schools", n_schools},
                      {"students_per_school", students_per_school},
                      {"students_per_school_jitter", students_per_school_jitter},
                      {"noise_sd", noise_sd},
                      {"seed", seed},
                      {"effect", e},
                      {"baseline",
                       {{"intercept", baseline.intercept},
                        {"coefficients", baseline.coefficients},
                        {"school_effect_sd", baseline.school_effect_sd}}},
                      {"propensity", p}};
  if (force_treatment) j["force_treatment"] = *force_treatment;
  return j;
}

Schema synthetic_schema() {
  std::vector<ColumnSpec> cols;
  cols.push_back({"schoolid", Level::kSchool, Kind::kCategorical, Role::kSchoolId});
  cols.push_back({"Z", Level::kStudent, Kind::kNumeric, Role::kTreatment});
  cols.push_back({"Y", Level::kStudent, Kind::kNumeric, Role::kOutcome});
  for (const auto& s : kStudentCovariates) cols.push_back({s, Level::kStudent, Kind::kNumeric, Role::kCovariate});
  for (const auto& x : kSchoolNumeric) cols.push_back({x, Level::kSchool, Kind::kNumeric, Role::kCovariate});
  cols.push_back({"XC", Level::kSchool, Kind::kCategorical, Role::kCovariate});
  return Schema(std::move(cols));
}

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  if (config.n_schools < 2) throw ArgumentError("generate_synthetic: n_schools must be >= 2");
  if (config.students_per_school < 1) throw ArgumentError("generate_synthetic: students_per_school must be >= 1");
  if (config.students_per_school_jitter >= config.students_per_school) {
    throw ArgumentError("generate_synthetic: jitter must be smaller than students_per_school");
  }
  if (!(config.noise_sd >= 0.0)) throw ArgumentError("generate_synthetic: noise_sd must be >= 0");
  if (config.force_treatment && *config.force_treatment != 0 && *config.force_treatment != 1) {
    throw ArgumentError("generate_synthetic: force_treatment must be 0 or 1");
  }
  const double bound = config.propensity.overlap_bound;
  if (!(bound > 0.0 && bound < 0.5)) throw ArgumentError("generate_synthetic: overlap_bound must be in (0, 0.5)");

  const Schema schema = synthetic_schema();
  std::vector<Column> cols(schema.size());
  auto col = [&](const std::string& name) -> Column& { return cols[schema.index_of(name)]; };
  GroundTruth truth;

  Engine school_engine = make_engine(config.seed, 1);
  Engine treat_engine = make_engine(config.seed, 3);
  Engine noise_engine = make_engine(config.seed, 4);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t j = 0; j < config.n_schools; ++j) {
    Row school;
    for (const auto& x : kSchoolNumeric) school.numeric[x] = std_normal(school_engine);
    school.category = kCategories[uniform_index(school_engine, kCategories.size())];
    const double u = config.baseline.school_effect_sd * std_normal(school_engine);
    std::size_t count = config.students_per_school;
    if (config.students_per_school_jitter > 0) {
      const std::size_t span = 2 * config.students_per_school_jitter + 1;
      count = count - config.students_per_school_jitter + uniform_index(school_engine, span);
    }
    char label[32];
    std::snprintf(label, sizeof(label), "S%03zu", j + 1);

    Engine student_engine = make_engine(derive_seed(config.seed, 2), j);
    for (std::size_t s = 0; s < count; ++s) {
      Row row = school;
      row.numeric["S3"] = static_cast<double>(1 + uniform_index(student_engine, 7));
      row.numeric["C1"] = static_cast<double>(1 + uniform_index(student_engine, 15));
      row.numeric["C2"] = static_cast<double>(1 + uniform_index(student_engine, 2));
      row.numeric["C3"] = static_cast<double>(uniform_index(student_engine, 2));

      const double mu0 = linear_form(row, config.baseline.intercept, config.baseline.coefficients) + u;
      const double tau = effect_of(config.effect, row);
      double p = config.propensity.value;
      if (config.propensity.kind == PropensitySpec::Kind::kLogistic) {
        const double eta = linear_form(row, config.propensity.intercept, config.propensity.coefficients);
        p = 1.0 / (1.0 + std::exp(-eta));
      }
      p = std::clamp(p, bound, 1.0 - bound);
      const double draw = unit(treat_engine);
      const int z = config.force_treatment ? *config.force_treatment : (draw < p ? 1 : 0);
      const double eps = config.noise_sd * std_normal(noise_engine);
      const double y = mu0 + (z == 1 ? tau : 0.0) + eps;

      col("schoolid").labels.emplace_back(label);
      col("Z").numbers.push_back(z);
      col("Y").numbers.push_back(y);
      for (const auto& name : kStudentCovariates) col(name).numbers.push_back(row.numeric[name]);
      for (const auto& name : kSchoolNumeric) col(name).numbers.push_back(row.numeric[name]);
      col("XC").labels.push_back(row.category);
      truth.tau.push_back(tau);
      truth.mu0.push_back(mu0);
      truth.propensity.push_back(p);
    }
  }
  return {Dataset(schema, std::move(cols)), std::move(truth)};
}

}  // namespace hetfx
