// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "hetfx/cate_table.h"
#include "hetfx/dataset.h"
#include "hetfx/encoding.h"
#include "hetfx/learners.h"
#include "hetfx/repnet.h"
#include "json.hpp"

namespace hetfx {

enum class Strategy { kTLearner, kRepNet };
std::string to_string(Strategy s);

// Estimates of (mu0, mu1) behind one CATE estimator: either two separately
// fitted base learners or one shared-representation network.
struct OutcomePairModel {
  Strategy strategy = Strategy::kTLearner;
  std::string model_id;
  std::uint64_t seed = 0;
  Encoder encoder;
  std::optional<FittedModel> f0;
  std::optional<FittedModel> f1;
  std::shared_ptr<const RepNetModel> repnet;

  // (mu0_hat, mu1_hat) for every row. ArgumentError on schema mismatch.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_pair(const Dataset& data) const;
  nlohmann::json to_json() const;
};

// f0 on z=0 rows, f1 on z=1 rows, both in the feature space of an encoder
// fitted on all training rows (or the supplied one). Seeds for f0 and f1
// derive from `seed`. FitError naming the empty group.
OutcomePairModel fit_t_learner(const Dataset& train, const EstimatorConfig& config,
                               std::uint64_t seed, const Encoder* encoder = nullptr);

// Wraps a fitted network as an outcome-pair model.
OutcomePairModel make_repnet_pair(RepNetModel model, std::string model_id, std::uint64_t seed);

// tau_hat_i = mu1_hat(x_i) - mu0_hat(x_i).
CateTable impute_cate(const OutcomePairModel& model, const Dataset& data);

}  // namespace hetfx
