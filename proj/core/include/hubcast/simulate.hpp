#pragma once

#include "hubcast/config.hpp"
#include "hubcast/eventlog.hpp"
#include "hubcast/network.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hubcast {

/// Mean demand for one origin-destination pair, in parcels per hour
/// before the time-of-day shape and day-of-week multiplier are applied.
struct DemandRate {
  std::string origin;
  std::string destination;
  double per_hour = 0.0;
};

/// Gamma dwell parameters for one hub kind (mean = shape * scale minutes).
struct DwellProfile {
  double shape = 2.0;
  double scale = 10.0;
};

/**
 * Synthetic-log generator settings.
 *
 * Config keys (see configs/demo_sim.cfg for a commented example):
 *   days, interval_minutes, seed, start_day_of_week, demand (repeated
 *   `origin,dest,per_hour`), hourly_shape (24 values), weekend_multiplier,
 *   congestion (repeated `minute_of_day:factor` control points),
 *   travel_sigma, dwell_access|dwell_local|dwell_gateway (`shape,scale`),
 *   dwell_tod_weight.
 */
struct SimConfig {
  int days = 30;
  int interval_minutes = 15;
  std::uint64_t seed = 0;
  int start_day_of_week = 0; // 0 = Monday
  std::vector<DemandRate> demand;
  std::array<double, 24> hourly_shape{};
  double weekend_multiplier = 1.0;
  std::vector<std::pair<int, double>> congestion; // minute-of-day control points
  double travel_sigma = 0.1;
  DwellProfile dwell_access, dwell_local, dwell_gateway;
  double dwell_tod_weight = 0.0; // 0 = dwell independent of time of day

  static SimConfig from_config(const KeyValueFile& kv);
  static SimConfig load(const std::string& path);
  void validate(const Network& net) const;

  long long horizon_end_minutes() const { return static_cast<long long>(days) * 1440; }
  int day_of_week(long long minute) const {
    return static_cast<int>(((minute / 1440) + start_day_of_week) % 7);
  }
  bool is_weekend(long long minute) const { return day_of_week(minute) >= 5; }
  /// Piecewise-linear interpolation of the congestion control points,
  /// wrapping around midnight.
  double congestion_factor(long long minute_of_day) const;
  const DwellProfile& dwell_profile(HubKind kind) const;
};

/**
 * Generates one parcel record per demand arrival over `cfg.days` days.
 *
 * Orders follow a piecewise-constant-intensity Poisson process per
 * (origin, destination) pair and hourly segment. Each journey walks the
 * routed path with gamma dwell at hubs and lognormal-noised travel on
 * routes. Records carry the complete journey even when it runs past the
 * demand horizon, so every generated parcel completes its path within the
 * log. Deterministic for a fixed (network, cfg): each (pair, day, hour)
 * segment and each parcel own an independent seeded substream.
 */
std::vector<ParcelRecord> simulate(const Network& net, const SimConfig& cfg);

} // namespace hubcast
