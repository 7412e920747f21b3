// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/network.h"

#include <cmath>

#include "hetfx/errors.h"

namespace hetfx {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void apply_activation(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::kRelu: z = z.cwiseMax(0.0); break;
    case Activation::kTanh: z = z.array().tanh(); break;
    case Activation::kIdentity: break;
  }
}

// d(activation)/d(pre) evaluated at the pre-activation, multiplied into g.
void multiply_derivative(Activation a, const Eigen::MatrixXd& pre, Eigen::MatrixXd& g) {
  switch (a) {
    case Activation::kRelu:
      g = (pre.array() > 0.0).select(g, 0.0);
      break;
    case Activation::kTanh:
      g = g.array() * (1.0 - pre.array().tanh().square());
      break;
    case Activation::kIdentity:
      break;
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity" || s == "linear") return Activation::kIdentity;
  throw ArgumentError("unknown activation '" + s + "'");
}

DenseStack::DenseStack(std::size_t input_width, const std::vector<std::size_t>& widths,
                       Activation hidden, Activation last)
    : input_width_(input_width) {
  std::size_t in = input_width;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (widths[l] == 0) throw ArgumentError("layer widths must be >= 1");
    Layer layer;
    layer.in = in;
    layer.out = widths[l];
    layer.activation = l + 1 == widths.size() ? last : hidden;
    layer.offset = num_params_;
    num_params_ += layer.in * layer.out + layer.out;
    layers_.push_back(layer);
    in = layer.out;
  }
}

void DenseStack::initialize(double* params, Engine& engine) const {
  for (const auto& layer : layers_) {
    const double fan_in = static_cast<double>(layer.in);
    const double fan_out = static_cast<double>(layer.out);
    const double limit = layer.activation == Activation::kRelu ? std::sqrt(6.0 / fan_in)
                                                               : std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) params[layer.offset + i] = dist(engine);
    for (std::size_t i = 0; i < layer.out; ++i) params[layer.offset + layer.in * layer.out + i] = 0.0;
  }
}

Eigen::MatrixXd DenseStack::forward(const double* params, const Eigen::MatrixXd& X,
                                    Cache* cache) const {
  if (static_cast<std::size_t>(X.cols()) != input_width_) {
    throw ArgumentError("network input has " + std::to_string(X.cols()) + " columns, expected " +
                        std::to_string(input_width_));
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Eigen::MatrixXd a = X;
  for (const auto& layer : layers_) {
    const Eigen::Map<const RowMajor> W(params + layer.offset, static_cast<Eigen::Index>(layer.out),
                                       static_cast<Eigen::Index>(layer.in));
    const Eigen::Map<const Eigen::RowVectorXd> b(params + layer.offset + layer.in * layer.out,
                                                 static_cast<Eigen::Index>(layer.out));
    Eigen::MatrixXd z = a * W.transpose();
    z.rowwise() += b;
    if (cache) {
      cache->inputs.push_back(std::move(a));
      cache->pre.push_back(z);
    }
    apply_activation(layer.activation, z);
    a = std::move(z);
  }
  return a;
}

void DenseStack::backward(const double* params, const Cache& cache,
                          const Eigen::MatrixXd& grad_output, double* grad,
                          Eigen::MatrixXd* grad_input) const {
  Eigen::MatrixXd g = grad_output;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    multiply_derivative(layer.activation, cache.pre[li], g);
    Eigen::Map<RowMajor> dW(grad + layer.offset, static_cast<Eigen::Index>(layer.out),
                            static_cast<Eigen::Index>(layer.in));
    Eigen::Map<Eigen::RowVectorXd> db(grad + layer.offset + layer.in * layer.out,
                                      static_cast<Eigen::Index>(layer.out));
    dW.noalias() += g.transpose() * cache.inputs[li];
    db += g.colwise().sum();
    if (li > 0 || grad_input) {
      const Eigen::Map<const RowMajor> W(params + layer.offset, static_cast<Eigen::Index>(layer.out),
                                         static_cast<Eigen::Index>(layer.in));
      g = g * W;
    }
  }
  if (grad_input) *grad_input = std::move(g);
}

double DenseStack::weight_sq_norm(const double* params) const {
  double s = 0.0;
  for (const auto& layer : layers_) {
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      s += params[layer.offset + i] * params[layer.offset + i];
    }
  }
  return s;
}

void DenseStack::add_weight_decay(const double* params, double coeff, double* grad) const {
  if (coeff == 0.0) return;
  for (const auto& layer : layers_) {
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      grad[layer.offset + i] += 2.0 * coeff * params[layer.offset + i];
    }
  }
}

nlohmann::json DenseStack::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"activation", to_string(l.activation)}});
  }
  return {{"input_width", input_width_}, {"layers", layers}};
}

DenseStack DenseStack::from_json(const nlohmann::json& j) {
  DenseStack s;
  s.input_width_ = j.at("input_width").get<std::size_t>();
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.in = lj.at("in").get<std::size_t>();
    l.out = lj.at("out").get<std::size_t>();
    l.activation = activation_from_string(lj.at("activation").get<std::string>());
    l.offset = s.num_params_;
    s.num_params_ += l.in * l.out + l.out;
    s.layers_.push_back(l);
  }
  return s;
}

nlohmann::json OptimizerParams::to_json() const {
  return {{"kind", kind == Kind::kAdam ? "adam" : "sgd"},
          {"learning_rate", learning_rate},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"momentum", momentum}};
}

OptimizerParams OptimizerParams::from_json(const nlohmann::json& j, OptimizerParams p) {
  if (j.contains("kind")) {
    const auto k = j.at("kind").get<std::string>();
    if (k == "adam") {
      p.kind = Kind::kAdam;
    } else if (k == "sgd") {
      p.kind = Kind::kSgd;
    } else {
      throw ArgumentError("unknown optimizer '" + k + "'");
    }
  }
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.beta1 = j.value("beta1", p.beta1);
  p.beta2 = j.value("beta2", p.beta2);
  p.epsilon = j.value("epsilon", p.epsilon);
  p.momentum = j.value("momentum", p.momentum);
  return p;
}

Optimizer::Optimizer(const OptimizerParams& params, std::size_t n)
    : params_(params),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {
  if (!(params.learning_rate > 0.0)) throw ArgumentError("optimizer learning_rate must be > 0");
}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  if (params_.kind == OptimizerParams::Kind::kSgd) {
    if (params_.momentum > 0.0) {
      m_ = params_.momentum * m_ + grad;
      params -= params_.learning_rate * m_;
    } else {
      params -= params_.learning_rate * grad;
    }
    return;
  }
  m_ = params_.beta1 * m_ + (1.0 - params_.beta1) * grad;
  v_ = params_.beta2 * v_ + (1.0 - params_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
  params.array() -= params_.learning_rate * (m_.array() / c1) /
                    ((v_.array() / c2).sqrt() + params_.epsilon);
}

}  // namespace hetfx
