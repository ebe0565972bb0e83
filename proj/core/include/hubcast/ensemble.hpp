#pragma once

#include "hubcast/dense_net.hpp"

#include <vector>

namespace hubcast {

/// Sub-model outputs plus the calendar encoding of the observation time;
/// the network input is their concatenation.
struct EnsembleInput {
  std::vector<double> u_hat;
  std::vector<double> o_hat;
  std::vector<double> calendar;

  std::vector<double> flattened() const;
  void check() const;
};

/// Elementwise total: c_hat[t] = u_hat[t] + o_hat[t].
std::vector<double> combine_sum(const std::vector<double>& u_hat,
                                const std::vector<double>& o_hat);

/// Single-hidden-layer combiner (256 units) over the concatenated
/// sub-model forecasts and calendar features.
struct EnsembleModel {
  DenseNet net;
  Normalizer normalizer;
  int horizon_periods = 96;

  void check() const;
};

/// Trains the combiner on historical (sub-model forecast, actual total)
/// pairs generated in walk-forward replay.
EnsembleModel train_ensemble(const std::vector<EnsembleInput>& inputs,
                             const std::vector<std::vector<double>>& actual_totals,
                             const TrainConfig& cfg);

/// Forward pass, clamped at zero.
std::vector<double> combine_ann(const EnsembleModel& model, const EnsembleInput& input);

} // namespace hubcast
