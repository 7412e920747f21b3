// Copyright 2026 The hetfx Authors.
// Licensed under the Apache License, Version 2.0 (see LICENSE).

#include "hetfx/tlearner.h"

#include "hetfx/errors.h"
#include "hetfx/random.h"

namespace hetfx {

std::string to_string(Strategy s) { return s == Strategy::kTLearner ? "t_learner" : "repnet"; }

std::pair<Eigen::VectorXd, Eigen::VectorXd> OutcomePairModel::predict_pair(const Dataset& data) const {
  if (strategy == Strategy::kRepNet) {
    if (!repnet) throw ArgumentError("outcome pair model has no network");
    const FeatureMatrix fm = repnet->encoder.transform(data);
    if (fm.cols() != repnet->arch.rep.input_width()) throw ArgumentError("predict_pair: schema mismatch");
    return repnet->predict_pair(fm.values);
  }
  if (!f0 || !f1) throw ArgumentError("outcome pair model is not fitted");
  const FeatureMatrix fm = encoder.transform(data);
  if (fm.cols() != f0->input_width()) throw ArgumentError("predict_pair: schema mismatch");
  return {f0->predict(fm.values), f1->predict(fm.values)};
}

nlohmann::json OutcomePairModel::to_json() const {
  nlohmann::json j = {{"strategy", to_string(strategy)}, {"model_id", model_id}, {"seed", seed}};
  if (strategy == Strategy::kRepNet) {
    j["network"] = repnet->to_json();
  } else {
    j["encoder"] = encoder.to_json();
    j["f0"] = f0->to_json();
    j["f1"] = f1->to_json();
  }
  return j;
}

OutcomePairModel fit_t_learner(const Dataset& train, const EstimatorConfig& config,
                               std::uint64_t seed, const Encoder* encoder) {
  const auto rows0 = train.group_rows(0);
  const auto rows1 = train.group_rows(1);
  if (rows0.empty()) throw FitError("fit_t_learner: control group (z=0) is empty");
  if (rows1.empty()) throw FitError("fit_t_learner: treated group (z=1) is empty");

  OutcomePairModel model;
  model.strategy = Strategy::kTLearner;
  model.model_id = to_string(config.family);
  model.seed = seed;
  model.encoder = encoder ? *encoder : Encoder::fit(train);
  const FeatureMatrix fm = model.encoder.transform(train);

  auto fit_group = [&](const std::vector<std::size_t>& rows, std::uint64_t stream) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), fm.values.cols());
    std::vector<double> y(rows.size());
    std::vector<std::size_t> schools(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      X.row(static_cast<Eigen::Index>(i)) = fm.values.row(static_cast<Eigen::Index>(rows[i]));
      y[i] = train.outcome(rows[i]);
      schools[i] = train.school_of(rows[i]);
    }
    TreeFitInputs inputs;
    inputs.school_ids = schools;
    return fit(config.with_seed(derive_seed(seed, stream)), X, y, inputs);
  };
  model.f0 = fit_group(rows0, 0);
  model.f1 = fit_group(rows1, 1);
  return model;
}

OutcomePairModel make_repnet_pair(RepNetModel net, std::string model_id, std::uint64_t seed) {
  OutcomePairModel model;
  model.strategy = Strategy::kRepNet;
  model.model_id = std::move(model_id);
  model.seed = seed;
  model.encoder = net.encoder;
  model.repnet = std::make_shared<const RepNetModel>(std::move(net));
  return model;
}

CateTable impute_cate(const OutcomePairModel& model, const Dataset& data) {
  const auto [mu0, mu1] = model.predict_pair(data);
  CateTable table;
  table.model_id = model.model_id;
  table.seed = model.seed;
  table.row_ids.assign(data.row_ids().begin(), data.row_ids().end());
  table.school_ids.reserve(data.num_rows());
  table.tau_hat.resize(data.num_rows());
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    table.school_ids.push_back(data.school_label(data.school_of(i)));
    table.tau_hat[i] = mu1(static_cast<Eigen::Index>(i)) - mu0(static_cast<Eigen::Index>(i));
  }
  return table;
}

}  // namespace hetfx
