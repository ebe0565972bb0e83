#pragma once

#include "hubcast/datastore.hpp"
#include "hubcast/dense_net.hpp"

#include <string>
#include <vector>

namespace hubcast {

/// Type I forecaster: a two-hidden-layer network (1024 and 512 units)
/// mapping the feature vector to the full T+1 horizon, with the feature
/// standardization fitted on its training window.
struct UnorderedModel {
  DenseNet net;
  Normalizer normalizer;
  int interval_minutes = 15;
  int horizon_periods = 96;
  long long train_window_start = 0;
  long long train_window_end = 0;

  void check() const;
};

/// Supervised samples plus their observation times (for later slicing
/// into fit and holdout windows by t_o).
struct UnorderedTrainingSet {
  Dataset data;
  std::vector<long long> observation_times;

  /// Keeps samples with lo <= t_o < hi.
  UnorderedTrainingSet slice(long long lo, long long hi) const;
};

/**
 * One (features, Type I target) pair per observation time, stepping by I
 * over every eligible training day. A day is eligible once both feature
 * blocks are computable for all of its observation times, i.e. from day 3
 * on; hence train_days >= 2 is required and yields (train_days - 2) * 96
 * samples at I = 15.
 */
UnorderedTrainingSet build_training_set(const EventLog& log, const std::string& hub,
                                        const IntervalSpec& spec_template, int train_days);

/// Same shape, but targets are total arrivals and the previous-day block
/// is total volume: training data for the direct total-volume method.
UnorderedTrainingSet build_total_training_set(const EventLog& log, const std::string& hub,
                                              const IntervalSpec& spec_template, int train_days);

/// Standardizes the inputs, trains the fixed 1024/512 architecture, and
/// packages the model with its normalization stats.
UnorderedModel fit_unordered(const UnorderedTrainingSet& training, const IntervalSpec& spec_template,
                             const TrainConfig& cfg);

/// Forward pass on the features at t_o, clamped at zero.
std::vector<double> forecast_unordered(const UnorderedModel& model, const EventLog& log,
                                       const std::string& hub, long long observation_time);

/// Direct method variant: same model shape over total-volume features.
std::vector<double> forecast_total_direct(const UnorderedModel& model, const EventLog& log,
                                          const std::string& hub, long long observation_time);

/// Model artifact plus a sidecar (`<path>.meta`) holding normalization
/// stats and the training window.
void save_unordered_model(const UnorderedModel& model, const std::string& path);
UnorderedModel load_unordered_model(const std::string& path);

} // namespace hubcast
