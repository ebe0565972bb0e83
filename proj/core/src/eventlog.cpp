#include "hubcast/eventlog.hpp"

#include "hubcast/config.hpp"
#include "hubcast/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hubcast {

namespace {
constexpr const char* kLogHeader = "#hubcast-eventlog v1";
}

std::optional<long long> ParcelRecord::arrival_at(const std::string& hub) const {
  for (const auto& e : events)
    if (!e.is_route() && e.location == hub) return e.arrival;
  return std::nullopt;
}

void write_event_log(const std::string& path, const std::vector<ParcelRecord>& records) {
  std::ofstream out(path, std::ios::binary); // binary: stable newlines for byte-exact logs
  if (!out) throw DataError("cannot open event log for writing: " + path);
  out << kLogHeader << "\n";
  for (const auto& r : records) {
    out << r.parcel_id << ',' << r.order_time << ',' << r.origin << ',' << r.destination << ',';
    for (std::size_t i = 0; i < r.path.size(); ++i) {
      if (i) out << '|';
      out << r.path[i];
    }
    out << ',';
    for (std::size_t i = 0; i < r.events.size(); ++i) {
      const auto& e = r.events[i];
      if (i) out << ';';
      out << '[' << e.location << ',' << e.arrival << ',';
      if (e.departure)
        out << *e.departure;
      else
        out << '-';
      out << ']';
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing event log: " + path);
}

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

ParcelRecord parse_record_line(const std::string& line, int lineno, const std::string& path) {
  auto fields = split_on(line, ',');
  // First five fields are fixed; events re-join everything after the path.
  if (fields.size() < 6)
    throw DataError(path + ":" + std::to_string(lineno) + ": malformed record line");
  ParcelRecord r;
  r.parcel_id = parse_int(fields[0], "parcel_id");
  r.order_time = parse_int(fields[1], "order_time");
  r.origin = fields[2];
  r.destination = fields[3];
  r.path = split_on(fields[4], '|');

  std::string events_field = fields[5];
  for (std::size_t i = 6; i < fields.size(); ++i) events_field += "," + fields[i];
  for (const auto& ev : split_on(events_field, ';')) {
    if (ev.size() < 2 || ev.front() != '[' || ev.back() != ']')
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed event: " + ev);
    auto parts = split_on(ev.substr(1, ev.size() - 2), ',');
    if (parts.size() != 3)
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed event: " + ev);
    ParcelEvent e;
    e.location = parts[0];
    e.arrival = parse_int(parts[1], "event arrival");
    if (parts[2] != "-") e.departure = parse_int(parts[2], "event departure");
    r.events.push_back(std::move(e));
  }
  return r;
}

} // namespace

std::vector<ParcelRecord> read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open event log: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty event log: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLogHeader)
    throw DataError(path + ": unsupported event-log header: `" + line + "`");
  std::vector<ParcelRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    records.push_back(parse_record_line(line, lineno, path));
  }
  return records;
}

} // namespace hubcast
