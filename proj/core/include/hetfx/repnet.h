// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hetfx/dataset.h"
#include "hetfx/encoding.h"
#include "hetfx/network.h"
#include "json.hpp"

namespace hetfx {

// Shared-representation potential-outcome network. alpha == 0 is TARNet;
// alpha > 0 adds alpha * mmd2(Phi(control batch), Phi(treated batch)) (CFR).
struct RepNetConfig {
  std::vector<std::size_t> rep_layers = {64, 64};
  std::vector<std::size_t> head_layers = {32};
  Activation activation = Activation::kRelu;
  double alpha = 0.0;
  // Kernel bandwidth; <= 0 selects the median pairwise distance of the
  // initial training representations.
  double mmd_sigma = 0.0;
  double l2_penalty = 1e-2;
  OptimizerParams optimizer;
  // Cosine annealing of the learning rate from optimizer.learning_rate in
  // the first epoch to this fraction of it in the last; 1 keeps it constant.
  double final_lr_fraction = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static RepNetConfig from_json(const nlohmann::json& j, RepNetConfig defaults);
  static RepNetConfig from_json(const nlohmann::json& j) { return from_json(j, RepNetConfig{}); }
};

struct RepNetEpoch {
  double factual = 0.0;  // training factual MSE
  double mmd = 0.0;      // mmd2 between group representations (monitor subsample)
};

// Parameter layout: [representation | head 0 | head 1].
struct RepNetArchitecture {
  DenseStack rep;
  DenseStack head0;
  DenseStack head1;

  RepNetArchitecture() = default;
  RepNetArchitecture(std::size_t input_width, const RepNetConfig& config);
  std::size_t num_params() const { return rep.num_params() + head0.num_params() + head1.num_params(); }
  std::size_t head0_offset() const { return rep.num_params(); }
  std::size_t head1_offset() const { return rep.num_params() + head0.num_params(); }
};

struct RepNetModel {
  Encoder encoder;
  RepNetArchitecture arch;
  Eigen::VectorXd params;
  double sigma = 1.0;
  RepNetConfig config;
  std::vector<RepNetEpoch> trace;

  Eigen::MatrixXd represent(const Eigen::MatrixXd& X) const;
  // (mu0_hat, mu1_hat) on an encoded matrix.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_pair(const Eigen::MatrixXd& X) const;

  nlohmann::json to_json() const;
  static RepNetModel from_json(const nlohmann::json& j);
};

// factual MSE over the batch (each row through its own group's head)
//   + alpha * mmd2(Phi(rows with z=0), Phi(rows with z=1); sigma)
//   + l2_penalty * sum of squared weights.
// The MMD term is skipped when alpha == 0 or a group is missing.
struct RepNetLoss {
  double total = 0.0;
  double factual = 0.0;
  double mmd = 0.0;
};
RepNetLoss repnet_objective(const RepNetArchitecture& arch, const Eigen::VectorXd& params,
                            const Eigen::MatrixXd& X, std::span<const double> y,
                            std::span<const int> z, double alpha, double sigma,
                            double l2_penalty, Eigen::VectorXd* grad);

// Trains on encoded features. Mini-batches are stratified so each holds at
// least one row of each group. TrainingError (with epoch) on divergence.
RepNetModel repnet_fit(const Eigen::MatrixXd& X, std::span<const double> y,
                       std::span<const int> z, const RepNetConfig& config);

// Fits the encoder on all rows of `train` (unless one is supplied), then
// trains. FitError when a treatment group is empty.
RepNetModel repnet_fit(const Dataset& train, const RepNetConfig& config,
                       const Encoder* encoder = nullptr);

std::pair<std::vector<double>, std::vector<double>> repnet_predict_pair(const RepNetModel& model,
                                                                        const Dataset& data);

}  // namespace hetfx
