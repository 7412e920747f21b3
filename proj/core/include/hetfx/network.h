// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hetfx/random.h"
#include "json.hpp"

namespace hetfx {

enum class Activation { kRelu, kTanh, kIdentity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// A stack of fully connected layers whose parameters live in an external
// flat vector. Layer l stores W_l (out x in, row-major) followed by b_l.
class DenseStack {
 public:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation activation = Activation::kIdentity;
    std::size_t offset = 0;  // first parameter of W_l
  };

  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // activations entering each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activations of each layer
  };

  DenseStack() = default;
  // `widths` are the output widths of successive layers. Every layer but
  // the last uses `hidden`; the last uses `last`.
  DenseStack(std::size_t input_width, const std::vector<std::size_t>& widths,
             Activation hidden, Activation last);

  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return layers_.empty() ? input_width_ : layers_.back().out; }
  std::size_t num_params() const { return num_params_; }
  const std::vector<Layer>& layers() const { return layers_; }

  // Uniform initialization: limit sqrt(6 / fan_in) for rectifier layers,
  // sqrt(6 / (fan_in + fan_out)) otherwise; biases start at zero.
  void initialize(double* params, Engine& engine) const;

  // X is batch x input_width. Fills `cache` when non-null.
  Eigen::MatrixXd forward(const double* params, const Eigen::MatrixXd& X, Cache* cache) const;

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  // Writes d(loss)/d(input) into `grad_input` when non-null.
  void backward(const double* params, const Cache& cache, const Eigen::MatrixXd& grad_output,
                double* grad, Eigen::MatrixXd* grad_input) const;

  // Sum of squared weight-matrix entries (biases excluded).
  double weight_sq_norm(const double* params) const;
  // grad += 2 * coeff * W for every weight matrix.
  void add_weight_decay(const double* params, double coeff, double* grad) const;

  nlohmann::json to_json() const;
  static DenseStack from_json(const nlohmann::json& j);

 private:
  std::size_t input_width_ = 0;
  std::size_t num_params_ = 0;
  std::vector<Layer> layers_;
};

struct OptimizerParams {
  enum class Kind { kAdam, kSgd };
  Kind kind = Kind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.0;  // sgd only

  nlohmann::json to_json() const;
  static OptimizerParams from_json(const nlohmann::json& j, OptimizerParams defaults);
  static OptimizerParams from_json(const nlohmann::json& j) { return from_json(j, OptimizerParams{}); }
};

// First-order optimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(const OptimizerParams& params, std::size_t n);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  void set_learning_rate(double lr) { params_.learning_rate = lr; }

 private:
  OptimizerParams params_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::size_t t_ = 0;
};

}  // namespace hetfx
