#include "hubcast/ordered.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hubcast {

long long OrderedForecast::total() const {
  long long sum = overflow;
  for (long long c : counts) sum += c;
  return sum;
}

namespace {

int hour_of(double minute) { return static_cast<int>(std::fmod(minute, 1440.0)) / 60; }

int dow_of(double minute, int start_day_of_week) {
  return static_cast<int>((static_cast<long long>(minute / 1440.0) + start_day_of_week) % 7);
}

} // namespace

ArrivalEstimate predict_arrival(const SnapshotEntry& parcel, long long observation_time,
                                const TimeModels& models, const Network& net,
                                int start_day_of_week) {
  if (parcel.remaining_path.empty())
    throw DataError("predict_arrival: parcel " + std::to_string(parcel.parcel_id) +
                    " has an empty remaining path");
  for (std::size_t i = 0; i + 1 < parcel.remaining_path.size(); ++i)
    if (!net.has_route(parcel.remaining_path[i], parcel.remaining_path[i + 1]))
      throw DataError("predict_arrival: remaining path of parcel " +
                      std::to_string(parcel.parcel_id) + " is not connected: " +
                      parcel.remaining_path[i] + " -> " + parcel.remaining_path[i + 1]);

  ArrivalEstimate estimate;
  estimate.parcel_id = parcel.parcel_id;
  double clock = static_cast<double>(observation_time);
  const auto& path = parcel.remaining_path;
  const std::string& target = path.back();

  auto add_dwell = [&](const std::string& hub) {
    double d = std::max(0.0, models.predict_dwell(hub, hour_of(clock),
                                                  dow_of(clock, start_day_of_week)));
    estimate.components.emplace_back(hub, d);
    clock += d;
  };
  auto add_travel = [&](const std::string& from, const std::string& to) {
    std::string route_id = from + "-" + to;
    double t = std::max(0.0, models.predict_travel(route_id, hour_of(clock),
                                                   dow_of(clock, start_day_of_week)));
    estimate.components.emplace_back(route_id, t);
    clock += t;
  };

  // Current segment: features come from its actual entry instant and the
  // elapsed stay is credited against the prediction.
  double entered_at = static_cast<double>(observation_time - parcel.elapsed_minutes);
  std::size_t at = 0; // index into path of the hub the parcel reaches next
  if (parcel.on_route) {
    double full = models.predict_travel(parcel.location, hour_of(entered_at),
                                        dow_of(entered_at, start_day_of_week));
    double remaining = std::max(0.0, full - static_cast<double>(parcel.elapsed_minutes));
    estimate.components.emplace_back(parcel.location, remaining);
    clock += remaining;
  } else if (path[0] != target) {
    double full = models.predict_dwell(parcel.location, hour_of(entered_at),
                                       dow_of(entered_at, start_day_of_week));
    double remaining = std::max(0.0, full - static_cast<double>(parcel.elapsed_minutes));
    estimate.components.emplace_back(parcel.location, remaining);
    clock += remaining;
    add_travel(path[0], path[1]);
    at = 1;
  }

  // Walk the rest: arrive at path[at], dwell unless it is the target,
  // travel on. The target hub contributes no dwell.
  while (path[at] != target) {
    add_dwell(path[at]);
    add_travel(path[at], path[at + 1]);
    ++at;
  }

  estimate.predicted_arrival = clock;
  return estimate;
}

OrderedForecast forecast_ordered(const ObservationSnapshot& snapshot, const IntervalSpec& spec,
                                 const TimeModels& models, const Network& net,
                                 int start_day_of_week) {
  spec.validate();
  if (snapshot.observation_time != spec.observation_time)
    throw DataError("forecast_ordered: snapshot and spec observation times differ");
  OrderedForecast forecast;
  forecast.spec = spec;
  forecast.counts.assign(static_cast<std::size_t>(spec.periods()), 0);
  for (const auto& parcel : snapshot.parcels) {
    ArrivalEstimate estimate =
        predict_arrival(parcel, snapshot.observation_time, models, net, start_day_of_week);
    double offset = estimate.predicted_arrival - static_cast<double>(spec.observation_time);
    long long period = static_cast<long long>(offset) / spec.interval_minutes;
    if (period > spec.last_index)
      ++forecast.overflow;
    else
      ++forecast.counts[static_cast<std::size_t>(period)];
  }
  return forecast;
}

std::vector<OrderedForecast> dynamic_update(const EventLog& log, const Network& net,
                                            const std::string& target_hub,
                                            const std::vector<IntervalSpec>& stream,
                                            const DynamicUpdateOptions& options) {
  std::vector<OrderedForecast> out;
  if (stream.empty()) return out;
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i].observation_time - stream[i - 1].observation_time != stream[i].interval_minutes)
      throw DataError("dynamic_update: observation times must advance by exactly I");

  TimeModels models;
  bool fitted = false;
  for (const auto& spec : stream) {
    if (!fitted || spec.observation_time - models.fitted_at >= options.refit_every_minutes) {
      models = fit_time_models(log, spec.observation_time, options.time_models);
      fitted = true;
    }
    ObservationSnapshot snap = log.snapshot(spec.observation_time, target_hub);
    out.push_back(
        forecast_ordered(snap, spec, models, net, log.start_day_of_week()));
  }
  return out;
}

} // namespace hubcast
