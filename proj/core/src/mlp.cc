// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/mlp.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetfx/errors.h"

namespace hetfx {

nlohmann::json MlpParams::to_json() const {
  return {{"hidden_layers", hidden_layers},
          {"activation", to_string(activation)},
          {"l2_penalty", l2_penalty},
          {"optimizer", optimizer.to_json()},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"zero_init", zero_init},
          {"seed", seed}};
}

MlpParams MlpParams::from_json(const nlohmann::json& j, MlpParams p) {
  if (j.contains("hidden_layers")) p.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
  if (j.contains("activation")) p.activation = activation_from_string(j.at("activation").get<std::string>());
  p.l2_penalty = j.value("l2_penalty", p.l2_penalty);
  if (j.contains("optimizer")) p.optimizer = OptimizerParams::from_json(j.at("optimizer"), p.optimizer);
  if (j.contains("learning_rate")) p.optimizer.learning_rate = j.at("learning_rate").get<double>();
  p.epochs = j.value("epochs", p.epochs);
  p.batch_size = j.value("batch_size", p.batch_size);
  p.zero_init = j.value("zero_init", p.zero_init);
  p.seed = j.value("seed", p.seed);
  return p;
}

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != network.input_width()) {
    throw ArgumentError("predict: expected " + std::to_string(network.input_width()) +
                        " features, got " + std::to_string(X.cols()));
  }
  return network.forward(params.data(), X, nullptr).col(0);
}

nlohmann::json MlpModel::to_json() const {
  return {{"network", network.to_json()},
          {"params", std::vector<double>(params.data(), params.data() + params.size())},
          {"loss_trace", loss_trace}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  MlpModel m;
  m.network = DenseStack::from_json(j.at("network"));
  const auto p = j.at("params").get<std::vector<double>>();
  m.params = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  m.loss_trace = j.value("loss_trace", std::vector<double>{});
  return m;
}

double mlp_objective(const DenseStack& network, const Eigen::VectorXd& params,
                     const Eigen::MatrixXd& X, std::span<const double> y, double l2_penalty,
                     Eigen::VectorXd* grad) {
  const auto n = static_cast<Eigen::Index>(y.size());
  DenseStack::Cache cache;
  const Eigen::MatrixXd out = network.forward(params.data(), X, grad ? &cache : nullptr);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::VectorXd r = out.col(0) - yv;
  const double loss = r.squaredNorm() / static_cast<double>(n) +
                      l2_penalty * network.weight_sq_norm(params.data());
  if (grad) {
    grad->setZero(params.size());
    const Eigen::MatrixXd g = (2.0 / static_cast<double>(n)) * r;
    network.backward(params.data(), cache, g, grad->data(), nullptr);
    network.add_weight_decay(params.data(), l2_penalty, grad->data());
  }
  return loss;
}

MlpModel mlp_fit(const Eigen::MatrixXd& X, std::span<const double> y, const MlpParams& params) {
  const std::size_t m = y.size();
  if (m == 0 || static_cast<std::size_t>(X.rows()) != m) throw ArgumentError("mlp_fit: empty or mismatched input");
  if (params.epochs < 1) throw ArgumentError("mlp_fit: epochs must be >= 1");
  if (params.batch_size < 1) throw ArgumentError("mlp_fit: batch_size must be >= 1");
  if (!(params.l2_penalty >= 0.0)) throw ArgumentError("mlp_fit: l2_penalty must be >= 0");

  std::vector<std::size_t> widths = params.hidden_layers;
  widths.push_back(1);
  MlpModel model;
  model.network = DenseStack(static_cast<std::size_t>(X.cols()), widths, params.activation,
                             Activation::kIdentity);
  model.params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.network.num_params()));
  Engine init_engine = make_engine(params.seed, 0);
  if (!params.zero_init) model.network.initialize(model.params.data(), init_engine);

  Optimizer opt(params.optimizer, model.network.num_params());
  Engine shuffle_engine = make_engine(params.seed, 1);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = std::min(params.batch_size, m);
  Eigen::VectorXd grad;
  Eigen::MatrixXd xb;
  std::vector<double> yb;
  for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
    if (bs < m) std::shuffle(order.begin(), order.end(), shuffle_engine);
    for (std::size_t start = 0; start < m; start += bs) {
      const std::size_t end = std::min(m, start + bs);
      xb.resize(static_cast<Eigen::Index>(end - start), X.cols());
      yb.resize(end - start);
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = X.row(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = y[order[i]];
      }
      const double loss = mlp_objective(model.network, model.params, xb, yb, params.l2_penalty, &grad);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw TrainingError("mlp_fit: loss diverged at epoch " + std::to_string(epoch));
      }
      opt.step(model.params, grad);
    }
    const double full = mlp_objective(model.network, model.params, X, y, params.l2_penalty, nullptr);
    if (!std::isfinite(full)) {
      throw TrainingError("mlp_fit: loss diverged at epoch " + std::to_string(epoch));
    }
    model.loss_trace.push_back(full);
  }
  return model;
}

}  // namespace hetfx
