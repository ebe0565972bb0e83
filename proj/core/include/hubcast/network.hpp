#pragma once

#include "hubcast/config.hpp"

#include <map>
#include <string>
#include <vector>

namespace hubcast {

enum class HubKind { access, local, gateway };

HubKind parse_hub_kind(const std::string& text);
std::string to_string(HubKind kind);

struct Hub {
  std::string id;
  HubKind kind = HubKind::access;
  std::string label;
};

/// Directed connection between two hubs.
struct Route {
  std::string from;
  std::string to;
  double base_travel_minutes = 0.0;

  std::string id() const { return from + "-" + to; }
};

/**
 * Hub/route graph plus the deterministic routing table.
 *
 * feasible_paths holds, for every ordered hub pair, the cheapest hub
 * sequence by summed base travel minutes; ties break toward the
 * lexicographically smaller hub sequence so routing is reproducible.
 */
struct Network {
  std::vector<Hub> hubs;
  std::vector<Route> routes;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> feasible_paths;

  bool has_hub(const std::string& id) const;
  const Hub& hub(const std::string& id) const;
  const Route& route(const std::string& from, const std::string& to) const;
  bool has_route(const std::string& from, const std::string& to) const;
  const std::vector<std::string>& path(const std::string& origin, const std::string& destination) const;
};

/**
 * Declarative network description as read from a spec file.
 *
 * Keys: repeated `hub = ID,kind[,label]` and `link = A,B,minutes` lines.
 * Links are undirected in the spec and expanded to a directed route pair.
 */
struct NetworkSpec {
  std::vector<Hub> hubs;
  std::vector<Route> links; // undirected; expanded both ways in build_network

  static NetworkSpec from_config(const KeyValueFile& kv);
  static NetworkSpec load(const std::string& path);
};

/// Validates the spec, expands links, and computes all-pairs feasible paths.
/// Throws ConfigError on unknown hubs, duplicates, or unreachable pairs.
Network build_network(const NetworkSpec& spec);

} // namespace hubcast
