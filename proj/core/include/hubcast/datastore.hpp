#pragma once

#include "hubcast/eventlog.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hubcast {

/**
 * Forecast window layout relative to an observation time.
 *
 * Period t covers [t_o + t*I, t_o + (t+1)*I) for t = 0..T; the horizon has
 * T+1 periods. Binning is left-closed right-open everywhere, so an arrival
 * exactly on a boundary belongs to the later period.
 */
struct IntervalSpec {
  int interval_minutes = 15;     // I
  int last_index = 95;           // T
  long long observation_time = 0; // t_o

  int periods() const { return last_index + 1; }
  long long window_start(int t) const {
    return observation_time + static_cast<long long>(t) * interval_minutes;
  }
  long long window_end(int t) const { return window_start(t) + interval_minutes; }
  long long horizon_end() const { return window_end(last_index); }
  IntervalSpec at(long long t_o) const { return {interval_minutes, last_index, t_o}; }
  void validate() const;
};

/// Arrival counts per period at one hub.
struct ArrivalSeries {
  std::string hub;
  IntervalSpec spec;
  std::vector<long long> counts; // length T+1

  long long total() const;
  std::vector<double> as_reals() const;
};

/// Position of one in-network parcel at the observation time.
struct SnapshotEntry {
  long long parcel_id = 0;
  bool on_route = false;
  std::string location;                   // hub id, or route id when on_route
  std::vector<std::string> remaining_path; // current (or next) hub .. target hub
  long long elapsed_minutes = 0;          // time already spent at `location`
  std::string destination;                // final destination of the parcel
};

/// All parcels ordered by t_o, routed through the target hub and not yet
/// arrived there.
struct ObservationSnapshot {
  long long observation_time = 0;
  std::string target_hub;
  std::vector<SnapshotEntry> parcels;
};

/// Model inputs for one observation time (lengths fixed by the spec:
/// T+1 previous-day values, 240/I recent totals, 9 calendar entries).
struct FeatureVector {
  std::vector<double> prev_day_unordered;
  std::vector<double> recent_totals;
  std::vector<double> calendar;

  std::vector<double> flattened() const;
};

/// Calendar encoding of an observation time: period-of-day index, hour of
/// day, and a 7-wide day-of-week one-hot.
std::vector<double> calendar_features(long long observation_time, int interval_minutes,
                                      int start_day_of_week);

/**
 * Immutable, indexed view over a parcel event log.
 *
 * All queries are pure reads; a loaded log can be shared freely across
 * threads. Windows that reach past the recorded data simply count zero
 * arrivals there; windows must not start before minute 0.
 */
class EventLog {
public:
  explicit EventLog(std::vector<ParcelRecord> records, int start_day_of_week = 0);
  static EventLog load(const std::string& path, int start_day_of_week = 0);

  const std::vector<ParcelRecord>& records() const { return records_; }
  long long end_time() const { return end_time_; }
  int start_day_of_week() const { return start_day_of_week_; }
  std::vector<std::string> hubs_seen() const;

  /// Counts every arrival event at `hub` per period of `spec`.
  ArrivalSeries bin_arrivals(const std::string& hub, const IntervalSpec& spec) const;

  /// Like bin_arrivals but only parcels ordered after t_o (Type I).
  ArrivalSeries unordered_target(const std::string& hub, const IntervalSpec& spec) const;

  /// Like bin_arrivals but only parcels ordered at or before t_o (Type II).
  ArrivalSeries ordered_arrivals(const std::string& hub, const IntervalSpec& spec) const;

  /// unordered_target split by the parcels' final destination hub.
  std::map<std::string, ArrivalSeries> unordered_by_destination(const std::string& hub,
                                                                const IntervalSpec& spec) const;

  /// Type II state at t_o for parcels routed through target_hub.
  ObservationSnapshot snapshot(long long observation_time, const std::string& target_hub) const;

  /// Feature vector whose first block is the previous day's unordered
  /// volume, evaluated at observation time t_o - 1440 (no leakage).
  FeatureVector build_features(const std::string& hub, long long observation_time,
                               const IntervalSpec& spec_template) const;

  /// Same layout, but the first block is the previous day's total volume;
  /// used by the direct total-volume forecaster.
  FeatureVector build_total_features(const std::string& hub, long long observation_time,
                                     const IntervalSpec& spec_template) const;

private:
  struct ArrivalRef {
    long long time;
    long long order_time;
    std::uint32_t record_index;
  };

  const std::vector<ArrivalRef>& hub_arrivals(const std::string& hub) const;
  std::vector<double> recent_total_block(const std::string& hub, long long observation_time,
                                         int interval_minutes) const;

  std::vector<ParcelRecord> records_;
  std::map<std::string, std::vector<ArrivalRef>> arrivals_by_hub_;
  long long end_time_ = 0;
  int start_day_of_week_ = 0;
};

/// Writes feature rows as tab-separated text with a header, for audits.
void write_feature_matrix(const std::string& path, const std::vector<FeatureVector>& rows,
                          const std::vector<long long>& observation_times);

} // namespace hubcast
