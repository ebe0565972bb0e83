#pragma once

#include "hubcast/datastore.hpp"
#include "hubcast/forest.hpp"
#include "hubcast/network.hpp"

#include <string>
#include <vector>

namespace hubcast {

/// Predicted arrival of one in-network parcel at the target hub, as the
/// observation time plus one predicted duration per remaining segment.
struct ArrivalEstimate {
  long long parcel_id = 0;
  double predicted_arrival = 0.0;
  std::vector<std::pair<std::string, double>> components; // (segment, minutes)
};

/// Binned Type II arrival forecast; estimates landing past the horizon are
/// counted in `overflow` so the snapshot population stays accounted for.
struct OrderedForecast {
  IntervalSpec spec;
  std::vector<long long> counts;
  long long overflow = 0;

  long long total() const;
};

/**
 * Sums predicted travel times over the remaining route segments and
 * predicted dwell times at intermediate hubs; the target hub itself
 * contributes no dwell. For the segment the parcel currently occupies,
 * the remaining duration is max(0, predicted - elapsed). Later segments
 * are entered at the accumulated predicted clock, so their time-of-day
 * features come from that predicted instant.
 */
ArrivalEstimate predict_arrival(const SnapshotEntry& parcel, long long observation_time,
                                const TimeModels& models, const Network& net,
                                int start_day_of_week = 0);

/// Bins every snapshot parcel's estimate into the spec's periods.
OrderedForecast forecast_ordered(const ObservationSnapshot& snapshot, const IntervalSpec& spec,
                                 const TimeModels& models, const Network& net,
                                 int start_day_of_week = 0);

struct DynamicUpdateOptions {
  TimeModelOptions time_models;
  long long refit_every_minutes = 1440; // duration models refresh cadence
};

/**
 * Walk-forward Type II replay: rebuilds the snapshot at every observation
 * time of the stream (which must advance by exactly I), refreshing the
 * duration models on the configured cadence, and emits one forecast per
 * observation time.
 */
std::vector<OrderedForecast> dynamic_update(const EventLog& log, const Network& net,
                                            const std::string& target_hub,
                                            const std::vector<IntervalSpec>& stream,
                                            const DynamicUpdateOptions& options);

} // namespace hubcast
