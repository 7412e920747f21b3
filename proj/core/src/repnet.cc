// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/repnet.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hetfx/errors.h"
#include "hetfx/mmd.h"

namespace hetfx {
namespace {

std::vector<std::size_t> head_widths(const RepNetConfig& c) {
  auto w = c.head_layers;
  w.push_back(1);
  return w;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(rows[i]);
  return out;
}

const std::size_t kMonitorRowsPerGroup = 500;

}  // namespace

void RepNetConfig::validate() const {
  if (rep_layers.empty()) throw ArgumentError("repnet: rep_layers must be non-empty");
  if (!(alpha >= 0.0)) throw ArgumentError("repnet: alpha must be >= 0");
  if (!(l2_penalty >= 0.0)) throw ArgumentError("repnet: l2_penalty must be >= 0");
  if (epochs < 1 || batch_size < 2) throw ArgumentError("repnet: epochs >= 1 and batch_size >= 2 required");
  if (!(optimizer.learning_rate > 0.0)) throw ArgumentError("repnet: learning_rate must be > 0");
  if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) {
    throw ArgumentError("repnet: final_lr_fraction must be in (0, 1]");
  }
}

nlohmann::json RepNetConfig::to_json() const {
  return {{"rep_layers", rep_layers},
          {"head_layers", head_layers},
          {"activation", to_string(activation)},
          {"alpha", alpha},
          {"mmd_sigma", mmd_sigma},
          {"l2_penalty", l2_penalty},
          {"optimizer", optimizer.to_json()},
          {"final_lr_fraction", final_lr_fraction},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"seed", seed}};
}

RepNetConfig RepNetConfig::from_json(const nlohmann::json& j, RepNetConfig c) {
  try {
    if (j.contains("rep_layers")) c.rep_layers = j.at("rep_layers").get<std::vector<std::size_t>>();
    if (j.contains("head_layers")) c.head_layers = j.at("head_layers").get<std::vector<std::size_t>>();
    if (j.contains("activation")) c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.alpha = j.value("alpha", c.alpha);
    c.mmd_sigma = j.value("mmd_sigma", c.mmd_sigma);
    c.l2_penalty = j.value("l2_penalty", c.l2_penalty);
    if (j.contains("optimizer")) c.optimizer = OptimizerParams::from_json(j.at("optimizer"), c.optimizer);
    if (j.contains("learning_rate")) c.optimizer.learning_rate = j.at("learning_rate").get<double>();
    c.final_lr_fraction = j.value("final_lr_fraction", c.final_lr_fraction);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("repnet config: ") + e.what());
  }
  c.validate();
  return c;
}

RepNetArchitecture::RepNetArchitecture(std::size_t input_width, const RepNetConfig& config)
    : rep(input_width, config.rep_layers, config.activation, config.activation),
      head0(rep.output_width(), head_widths(config), config.activation, Activation::kIdentity),
      head1(rep.output_width(), head_widths(config), config.activation, Activation::kIdentity) {}

Eigen::MatrixXd RepNetModel::represent(const Eigen::MatrixXd& X) const {
  return arch.rep.forward(params.data(), X, nullptr);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> RepNetModel::predict_pair(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd phi = represent(X);
  return {arch.head0.forward(params.data() + arch.head0_offset(), phi, nullptr).col(0),
          arch.head1.forward(params.data() + arch.head1_offset(), phi, nullptr).col(0)};
}

nlohmann::json RepNetModel::to_json() const {
  nlohmann::json trace_j = nlohmann::json::array();
  for (const auto& e : trace) trace_j.push_back({e.factual, e.mmd});
  return {{"format_version", 1},
          {"family", "repnet"},
          {"encoder", encoder.to_json()},
          {"config", config.to_json()},
          {"sigma", sigma},
          {"params", std::vector<double>(params.data(), params.data() + params.size())},
          {"trace", trace_j}};
}

RepNetModel RepNetModel::from_json(const nlohmann::json& j) {
  if (j.at("family").get<std::string>() != "repnet") throw ArgumentError("not a repnet model document");
  RepNetModel m;
  m.encoder = Encoder::from_json(j.at("encoder"));
  m.config = RepNetConfig::from_json(j.at("config"));
  m.arch = RepNetArchitecture(m.encoder.width(), m.config);
  m.sigma = j.at("sigma").get<double>();
  const auto p = j.at("params").get<std::vector<double>>();
  if (p.size() != m.arch.num_params()) throw ArgumentError("repnet parameter count mismatch");
  m.params = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  for (const auto& e : j.value("trace", nlohmann::json::array())) {
    m.trace.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  }
  return m;
}

RepNetLoss repnet_objective(const RepNetArchitecture& arch, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& X, std::span<const double> y,
                            std::span<const int> z, double alpha, double sigma,
                            double l2_penalty, Eigen::VectorXd* grad) {
  const auto n = X.rows();
  if (static_cast<std::size_t>(n) != y.size() || y.size() != z.size() || n == 0) {
    throw ArgumentError("repnet_objective: mismatched batch");
  }
  std::vector<Eigen::Index> rows0, rows1;
  for (Eigen::Index i = 0; i < n; ++i) (z[static_cast<std::size_t>(i)] == 1 ? rows1 : rows0).push_back(i);

  DenseStack::Cache rep_cache;
  const Eigen::MatrixXd phi = arch.rep.forward(params.data(), X, grad ? &rep_cache : nullptr);
  Eigen::MatrixXd grad_phi;
  if (grad) {
    grad->setZero(params.size());
    grad_phi.setZero(phi.rows(), phi.cols());
  }

  RepNetLoss loss;
  const double inv_n = 1.0 / static_cast<double>(n);
  auto head_pass = [&](const DenseStack& head, std::size_t offset, const std::vector<Eigen::Index>& rows) {
    if (rows.empty()) return Eigen::MatrixXd();
    const Eigen::MatrixXd phi_g = gather(phi, rows);
    DenseStack::Cache cache;
    const Eigen::MatrixXd out = head.forward(params.data() + offset, phi_g, grad ? &cache : nullptr);
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = out(static_cast<Eigen::Index>(i), 0) - y[static_cast<std::size_t>(rows[i])];
    }
    loss.factual += r.squaredNorm() * inv_n;
    if (grad) {
      Eigen::MatrixXd g_in;
      const Eigen::MatrixXd g_out = (2.0 * inv_n) * r;
      head.backward(params.data() + offset, cache, g_out, grad->data() + offset, &g_in);
      for (std::size_t i = 0; i < rows.size(); ++i) grad_phi.row(rows[i]) += g_in.row(static_cast<Eigen::Index>(i));
    }
    return phi_g;
  };
  const Eigen::MatrixXd phi0 = head_pass(arch.head0, arch.head0_offset(), rows0);
  const Eigen::MatrixXd phi1 = head_pass(arch.head1, arch.head1_offset(), rows1);

  if (alpha > 0.0 && !rows0.empty() && !rows1.empty()) {
    Eigen::MatrixXd g0, g1;
    loss.mmd = mmd2_rbf_grad(phi0, phi1, sigma, grad ? &g0 : nullptr, grad ? &g1 : nullptr);
    if (grad) {
      for (std::size_t i = 0; i < rows0.size(); ++i) grad_phi.row(rows0[i]) += alpha * g0.row(static_cast<Eigen::Index>(i));
      for (std::size_t i = 0; i < rows1.size(); ++i) grad_phi.row(rows1[i]) += alpha * g1.row(static_cast<Eigen::Index>(i));
    }
  }

  const double l2 = arch.rep.weight_sq_norm(params.data()) +
                    arch.head0.weight_sq_norm(params.data() + arch.head0_offset()) +
                    arch.head1.weight_sq_norm(params.data() + arch.head1_offset());
  loss.total = loss.factual + alpha * loss.mmd + l2_penalty * l2;

  if (grad) {
    arch.rep.backward(params.data(), rep_cache, grad_phi, grad->data(), nullptr);
    arch.rep.add_weight_decay(params.data(), l2_penalty, grad->data());
    arch.head0.add_weight_decay(params.data() + arch.head0_offset(), l2_penalty, grad->data() + arch.head0_offset());
    arch.head1.add_weight_decay(params.data() + arch.head1_offset(), l2_penalty, grad->data() + arch.head1_offset());
  }
  return loss;
}

RepNetModel repnet_fit(const Eigen::MatrixXd& X, std::span<const double> y,
                       std::span<const int> z, const RepNetConfig& config) {
  config.validate();
  const auto m = static_cast<std::size_t>(X.rows());
  if (m == 0 || y.size() != m || z.size() != m) throw ArgumentError("repnet_fit: empty or mismatched input");
  std::vector<std::size_t> g0, g1;
  for (std::size_t i = 0; i < m; ++i) (z[i] == 1 ? g1 : g0).push_back(i);
  if (g0.empty()) throw FitError("repnet_fit: control group (z=0) is empty");
  if (g1.empty()) throw FitError("repnet_fit: treated group (z=1) is empty");

  RepNetModel model;
  model.config = config;
  model.arch = RepNetArchitecture(static_cast<std::size_t>(X.cols()), config);
  model.params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.arch.num_params()));
  Engine init = make_engine(config.seed, 0);
  model.arch.rep.initialize(model.params.data(), init);
  model.arch.head0.initialize(model.params.data() + model.arch.head0_offset(), init);
  model.arch.head1.initialize(model.params.data() + model.arch.head1_offset(), init);

  model.sigma = config.mmd_sigma > 0.0 ? config.mmd_sigma : median_pairwise_distance(model.represent(X));

  // Fixed monitor subsample for the per-epoch imbalance trace.
  std::vector<Eigen::Index> mon0, mon1;
  for (std::size_t i = 0; i < std::min(g0.size(), kMonitorRowsPerGroup); ++i) {
    mon0.push_back(static_cast<Eigen::Index>(g0[i * g0.size() / std::min(g0.size(), kMonitorRowsPerGroup)]));
  }
  for (std::size_t i = 0; i < std::min(g1.size(), kMonitorRowsPerGroup); ++i) {
    mon1.push_back(static_cast<Eigen::Index>(g1[i * g1.size() / std::min(g1.size(), kMonitorRowsPerGroup)]));
  }
  const Eigen::MatrixXd X_mon0 = gather(X, mon0);
  const Eigen::MatrixXd X_mon1 = gather(X, mon1);

  std::size_t n_batches = (m + config.batch_size - 1) / config.batch_size;
  n_batches = std::max<std::size_t>(1, std::min({n_batches, g0.size(), g1.size()}));

  Optimizer opt(config.optimizer, model.arch.num_params());
  Engine shuffle = make_engine(config.seed, 1);
  Eigen::VectorXd grad;
  std::vector<double> yb;
  std::vector<int> zb;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double progress =
        config.epochs > 1 ? static_cast<double>(epoch - 1) / static_cast<double>(config.epochs - 1) : 0.0;
    const double scale = config.final_lr_fraction +
                         (1.0 - config.final_lr_fraction) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    opt.set_learning_rate(config.optimizer.learning_rate * scale);
    std::shuffle(g0.begin(), g0.end(), shuffle);
    std::shuffle(g1.begin(), g1.end(), shuffle);
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::vector<std::size_t> rows;
      for (std::size_t i = b * g0.size() / n_batches; i < (b + 1) * g0.size() / n_batches; ++i) rows.push_back(g0[i]);
      for (std::size_t i = b * g1.size() / n_batches; i < (b + 1) * g1.size() / n_batches; ++i) rows.push_back(g1[i]);
      Eigen::MatrixXd xb(static_cast<Eigen::Index>(rows.size()), X.cols());
      yb.resize(rows.size());
      zb.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
        yb[i] = y[rows[i]];
        zb[i] = z[rows[i]];
      }
      const RepNetLoss loss = repnet_objective(model.arch, model.params, xb, yb, zb, config.alpha,
                                               model.sigma, config.l2_penalty, &grad);
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        throw TrainingError("repnet_fit: loss diverged at epoch " + std::to_string(epoch));
      }
      opt.step(model.params, grad);
    }
    const auto [mu0, mu1] = model.predict_pair(X);
    double factual = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double f = z[i] == 1 ? mu1(static_cast<Eigen::Index>(i)) : mu0(static_cast<Eigen::Index>(i));
      factual += (f - y[i]) * (f - y[i]);
    }
    factual /= static_cast<double>(m);
    if (!std::isfinite(factual)) {
      throw TrainingError("repnet_fit: loss diverged at epoch " + std::to_string(epoch));
    }
    const double mmd = mmd2_rbf(model.represent(X_mon0), model.represent(X_mon1), model.sigma);
    model.trace.push_back({factual, mmd});
  }
  return model;
}

RepNetModel repnet_fit(const Dataset& train, const RepNetConfig& config, const Encoder* encoder) {
  if (train.group_rows(0).empty()) throw FitError("repnet_fit: control group (z=0) is empty");
  if (train.group_rows(1).empty()) throw FitError("repnet_fit: treated group (z=1) is empty");
  Encoder enc = encoder ? *encoder : Encoder::fit(train);
  const FeatureMatrix fm = enc.transform(train);
  RepNetModel model = repnet_fit(fm.values, train.outcomes(), train.treatments(), config);
  model.encoder = std::move(enc);
  return model;
}

std::pair<std::vector<double>, std::vector<double>> repnet_predict_pair(const RepNetModel& model,
                                                                        const Dataset& data) {
  const FeatureMatrix fm = model.encoder.transform(data);
  if (fm.cols() != model.arch.rep.input_width()) throw ArgumentError("repnet_predict_pair: schema mismatch");
  const auto [mu0, mu1] = model.predict_pair(fm.values);
  return {std::vector<double>(mu0.data(), mu0.data() + mu0.size()),
          std::vector<double>(mu1.data(), mu1.data() + mu1.size())};
}

}  // namespace hetfx
