#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hubcast {

/**
 * One contiguous stay at a hub or on a route.
 *
 * Hub events: arrival = entering the hub, departure = leaving it; the final
 * destination event of a parcel has no departure. Route events: arrival =
 * leaving the previous hub, departure = arriving at the next one, so the
 * events of a record tile time with no gaps.
 */
struct ParcelEvent {
  std::string location; // hub id, or "from-to" for a route
  long long arrival = 0;
  std::optional<long long> departure;

  bool is_route() const { return location.find('-') != std::string::npos; }
};

/// Full travel history of one parcel. Timestamps are integer minutes
/// since the start of the log.
struct ParcelRecord {
  long long parcel_id = 0;
  long long order_time = 0;
  std::string origin;
  std::string destination;
  std::vector<std::string> path;
  std::vector<ParcelEvent> events;

  /// Arrival time at a hub on the path, if the record contains it.
  std::optional<long long> arrival_at(const std::string& hub) const;
};

/**
 * Event-log file format (one parcel per line, `-` for "no departure"):
 *
 *   #hubcast-eventlog v1
 *   parcel_id,order_time,origin,destination,A|B|C,[A,0,12];[A-B,12,40];[B,40,-]
 */
void write_event_log(const std::string& path, const std::vector<ParcelRecord>& records);
std::vector<ParcelRecord> read_event_log(const std::string& path);

} // namespace hubcast
