#include "hubcast/datastore.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace hubcast {

void IntervalSpec::validate() const {
  if (interval_minutes <= 0) throw ConfigError("interval spec: I must be positive");
  if (last_index < 0) throw ConfigError("interval spec: T must be >= 0");
  if (observation_time < 0) throw ConfigError("interval spec: t_o must be >= 0");
}

long long ArrivalSeries::total() const {
  long long sum = 0;
  for (long long c : counts) sum += c;
  return sum;
}

std::vector<double> ArrivalSeries::as_reals() const {
  return std::vector<double>(counts.begin(), counts.end());
}

std::vector<double> FeatureVector::flattened() const {
  std::vector<double> out;
  out.reserve(prev_day_unordered.size() + recent_totals.size() + calendar.size());
  out.insert(out.end(), prev_day_unordered.begin(), prev_day_unordered.end());
  out.insert(out.end(), recent_totals.begin(), recent_totals.end());
  out.insert(out.end(), calendar.begin(), calendar.end());
  return out;
}

std::vector<double> calendar_features(long long observation_time, int interval_minutes,
                                      int start_day_of_week) {
  long long minute_of_day = observation_time % 1440;
  std::vector<double> out;
  out.reserve(9);
  out.push_back(static_cast<double>(minute_of_day / interval_minutes));
  out.push_back(static_cast<double>(minute_of_day / 60));
  int dow = static_cast<int>(((observation_time / 1440) + start_day_of_week) % 7);
  for (int d = 0; d < 7; ++d) out.push_back(d == dow ? 1.0 : 0.0);
  return out;
}

EventLog::EventLog(std::vector<ParcelRecord> records, int start_day_of_week)
    : records_(std::move(records)), start_day_of_week_(start_day_of_week) {
  for (std::uint32_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.events.empty()) throw DataError("parcel record without events: id " +
                                          std::to_string(r.parcel_id));
    for (const auto& e : r.events) {
      end_time_ = std::max(end_time_, e.departure.value_or(e.arrival));
      if (!e.is_route()) arrivals_by_hub_[e.location].push_back({e.arrival, r.order_time, i});
    }
  }
  for (auto& [hub, refs] : arrivals_by_hub_)
    std::sort(refs.begin(), refs.end(),
              [](const ArrivalRef& a, const ArrivalRef& b) { return a.time < b.time; });
}

EventLog EventLog::load(const std::string& path, int start_day_of_week) {
  return EventLog(read_event_log(path), start_day_of_week);
}

std::vector<std::string> EventLog::hubs_seen() const {
  std::vector<std::string> out;
  for (const auto& [hub, refs] : arrivals_by_hub_) out.push_back(hub);
  return out;
}

const std::vector<EventLog::ArrivalRef>& EventLog::hub_arrivals(const std::string& hub) const {
  auto it = arrivals_by_hub_.find(hub);
  if (it == arrivals_by_hub_.end()) throw DataError("no arrivals recorded for hub: " + hub);
  return it->second;
}

namespace {

template <typename Pred>
ArrivalSeries bin_with(const std::vector<EventLog::ArrivalRef>*, const std::string&,
                       const IntervalSpec&, Pred);

} // namespace

ArrivalSeries EventLog::bin_arrivals(const std::string& hub, const IntervalSpec& spec) const {
  spec.validate();
  const auto& refs = hub_arrivals(hub);
  ArrivalSeries series{hub, spec, std::vector<long long>(spec.periods(), 0)};
  auto first = std::lower_bound(refs.begin(), refs.end(), spec.window_start(0),
                                [](const ArrivalRef& r, long long t) { return r.time < t; });
  for (auto it = first; it != refs.end() && it->time < spec.horizon_end(); ++it)
    ++series.counts[(it->time - spec.observation_time) / spec.interval_minutes];
  return series;
}

ArrivalSeries EventLog::unordered_target(const std::string& hub, const IntervalSpec& spec) const {
  spec.validate();
  const auto& refs = hub_arrivals(hub);
  ArrivalSeries series{hub, spec, std::vector<long long>(spec.periods(), 0)};
  auto first = std::lower_bound(refs.begin(), refs.end(), spec.window_start(0),
                                [](const ArrivalRef& r, long long t) { return r.time < t; });
  for (auto it = first; it != refs.end() && it->time < spec.horizon_end(); ++it)
    if (it->order_time > spec.observation_time)
      ++series.counts[(it->time - spec.observation_time) / spec.interval_minutes];
  return series;
}

ArrivalSeries EventLog::ordered_arrivals(const std::string& hub, const IntervalSpec& spec) const {
  spec.validate();
  const auto& refs = hub_arrivals(hub);
  ArrivalSeries series{hub, spec, std::vector<long long>(spec.periods(), 0)};
  auto first = std::lower_bound(refs.begin(), refs.end(), spec.window_start(0),
                                [](const ArrivalRef& r, long long t) { return r.time < t; });
  for (auto it = first; it != refs.end() && it->time < spec.horizon_end(); ++it)
    if (it->order_time <= spec.observation_time)
      ++series.counts[(it->time - spec.observation_time) / spec.interval_minutes];
  return series;
}

std::map<std::string, ArrivalSeries> EventLog::unordered_by_destination(
    const std::string& hub, const IntervalSpec& spec) const {
  spec.validate();
  const auto& refs = hub_arrivals(hub);
  std::map<std::string, ArrivalSeries> out;
  auto first = std::lower_bound(refs.begin(), refs.end(), spec.window_start(0),
                                [](const ArrivalRef& r, long long t) { return r.time < t; });
  for (auto it = first; it != refs.end() && it->time < spec.horizon_end(); ++it) {
    if (it->order_time <= spec.observation_time) continue;
    const std::string& dest = records_[it->record_index].destination;
    auto [slot, inserted] = out.try_emplace(
        dest, ArrivalSeries{hub, spec, std::vector<long long>(spec.periods(), 0)});
    ++slot->second.counts[(it->time - spec.observation_time) / spec.interval_minutes];
  }
  return out;
}

ObservationSnapshot EventLog::snapshot(long long observation_time,
                                       const std::string& target_hub) const {
  ObservationSnapshot snap;
  snap.observation_time = observation_time;
  snap.target_hub = target_hub;
  for (const auto& r : records_) {
    if (r.order_time > observation_time) continue;
    auto target_pos = std::find(r.path.begin(), r.path.end(), target_hub);
    if (target_pos == r.path.end()) continue;
    auto arrived = r.arrival_at(target_hub);
    if (arrived && *arrived <= observation_time) continue;

    // Locate the event whose [arrival, departure) window contains t_o.
    // Events tile time, so this is the last event starting at or before t_o.
    std::size_t at = r.events.size();
    for (std::size_t i = 0; i < r.events.size(); ++i) {
      if (r.events[i].arrival > observation_time) break;
      at = i;
    }
    if (at == r.events.size()) continue; // ordered but not yet in the log's window
    const auto& e = r.events[at];
    if (e.departure && observation_time >= *e.departure) at = std::min(at + 1, r.events.size() - 1);
    const auto& cur = r.events[at];

    SnapshotEntry entry;
    entry.parcel_id = r.parcel_id;
    entry.on_route = cur.is_route();
    entry.location = cur.location;
    entry.elapsed_minutes = observation_time - cur.arrival;
    entry.destination = r.destination;

    // Remaining hubs up to and including the target. When on a route the
    // path resumes at the route's far end.
    std::size_t resume = 0;
    if (entry.on_route) {
      auto dash = cur.location.find('-');
      std::string next_hub = cur.location.substr(dash + 1);
      while (resume < r.path.size() && r.path[resume] != next_hub) ++resume;
    } else {
      while (resume < r.path.size() && r.path[resume] != cur.location) ++resume;
    }
    std::size_t target_index = static_cast<std::size_t>(target_pos - r.path.begin());
    for (std::size_t k = resume; k <= target_index && k < r.path.size(); ++k)
      entry.remaining_path.push_back(r.path[k]);
    snap.parcels.push_back(std::move(entry));
  }
  return snap;
}

std::vector<double> EventLog::recent_total_block(const std::string& hub,
                                                 long long observation_time,
                                                 int interval_minutes) const {
  int slots = 240 / interval_minutes;
  IntervalSpec recent{interval_minutes, slots - 1, observation_time - 240};
  return bin_arrivals(hub, recent).as_reals();
}

FeatureVector EventLog::build_features(const std::string& hub, long long observation_time,
                                       const IntervalSpec& spec_template) const {
  if (observation_time < 1440 + 240)
    throw DataError("cold start: features need 24h of history plus a 4h recent window");
  FeatureVector f;
  f.prev_day_unordered =
      unordered_target(hub, spec_template.at(observation_time - 1440)).as_reals();
  f.recent_totals = recent_total_block(hub, observation_time, spec_template.interval_minutes);
  f.calendar =
      calendar_features(observation_time, spec_template.interval_minutes, start_day_of_week_);
  return f;
}

FeatureVector EventLog::build_total_features(const std::string& hub, long long observation_time,
                                             const IntervalSpec& spec_template) const {
  if (observation_time < 1440 + 240)
    throw DataError("cold start: features need 24h of history plus a 4h recent window");
  FeatureVector f;
  f.prev_day_unordered = bin_arrivals(hub, spec_template.at(observation_time - 1440)).as_reals();
  f.recent_totals = recent_total_block(hub, observation_time, spec_template.interval_minutes);
  f.calendar =
      calendar_features(observation_time, spec_template.interval_minutes, start_day_of_week_);
  return f;
}

void write_feature_matrix(const std::string& path, const std::vector<FeatureVector>& rows,
                          const std::vector<long long>& observation_times) {
  if (rows.size() != observation_times.size())
    throw ShapeError("feature matrix: rows and observation times differ in length");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open feature matrix for writing: " + path);
  out << "#hubcast-features v1\n";
  out << "observation_time";
  if (!rows.empty()) {
    for (std::size_t i = 0; i < rows.front().prev_day_unordered.size(); ++i)
      out << "\tprev_day_" << i;
    for (std::size_t i = 0; i < rows.front().recent_totals.size(); ++i) out << "\trecent_" << i;
    for (std::size_t i = 0; i < rows.front().calendar.size(); ++i) out << "\tcal_" << i;
  }
  out << "\n";
  char buf[32];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << observation_times[r];
    for (double v : rows[r].flattened()) {
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

} // namespace hubcast
