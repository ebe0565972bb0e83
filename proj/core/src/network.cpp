#include "hubcast/network.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace hubcast {

HubKind parse_hub_kind(const std::string& text) {
  if (text == "access") return HubKind::access;
  if (text == "local") return HubKind::local;
  if (text == "gateway") return HubKind::gateway;
  throw ConfigError("unknown hub kind: `" + text + "` (expected access|local|gateway)");
}

std::string to_string(HubKind kind) {
  switch (kind) {
    case HubKind::access: return "access";
    case HubKind::local: return "local";
    case HubKind::gateway: return "gateway";
  }
  return "?";
}

bool Network::has_hub(const std::string& id) const {
  return std::any_of(hubs.begin(), hubs.end(), [&](const Hub& h) { return h.id == id; });
}

const Hub& Network::hub(const std::string& id) const {
  for (const auto& h : hubs)
    if (h.id == id) return h;
  throw DataError("unknown hub: " + id);
}

bool Network::has_route(const std::string& from, const std::string& to) const {
  return std::any_of(routes.begin(), routes.end(),
                     [&](const Route& r) { return r.from == from && r.to == to; });
}

const Route& Network::route(const std::string& from, const std::string& to) const {
  for (const auto& r : routes)
    if (r.from == from && r.to == to) return r;
  throw DataError("unknown route: " + from + "-" + to);
}

const std::vector<std::string>& Network::path(const std::string& origin,
                                              const std::string& destination) const {
  auto it = feasible_paths.find({origin, destination});
  if (it == feasible_paths.end())
    throw DataError("no feasible path: " + origin + " -> " + destination);
  return it->second;
}

NetworkSpec NetworkSpec::from_config(const KeyValueFile& kv) {
  NetworkSpec spec;
  for (const auto& line : kv.get_all("hub")) {
    auto parts = split_list(line);
    if (parts.size() < 2)
      throw ConfigError(kv.origin() + ": hub needs `id,kind[,label]`: " + line);
    Hub h;
    h.id = parts[0];
    h.kind = parse_hub_kind(parts[1]);
    h.label = parts.size() > 2 ? parts[2] : parts[0];
    if (h.id.find_first_of(",|;[]- \t") != std::string::npos)
      throw ConfigError(kv.origin() + ": hub id contains reserved characters: " + h.id);
    spec.hubs.push_back(std::move(h));
  }
  for (const auto& line : kv.get_all("link")) {
    auto parts = split_list(line);
    if (parts.size() != 3)
      throw ConfigError(kv.origin() + ": link needs `from,to,minutes`: " + line);
    Route r;
    r.from = parts[0];
    r.to = parts[1];
    r.base_travel_minutes = parse_double(parts[2], kv.origin() + ":link");
    spec.links.push_back(std::move(r));
  }
  return spec;
}

NetworkSpec NetworkSpec::load(const std::string& path) {
  return from_config(KeyValueFile::parse_file(path));
}

namespace {

// Dijkstra from one source with lexicographic tie-breaking on the hub
// sequence, so equal-cost paths resolve the same way on every run.
void shortest_paths_from(const Network& net, std::size_t src,
                         const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                         std::vector<std::vector<std::string>>& out_paths) {
  const std::size_t n = net.hubs.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::vector<std::string>> path(n);
  std::vector<bool> done(n, false);
  dist[src] = 0.0;
  path[src] = {net.hubs[src].id};

  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && dist[i] < inf && (best == n || dist[i] < dist[best] ||
                                        (dist[i] == dist[best] && path[i] < path[best])))
        best = i;
    if (best == n) break;
    done[best] = true;
    for (const auto& [next, w] : adj[best]) {
      double cand = dist[best] + w;
      std::vector<std::string> cand_path = path[best];
      cand_path.push_back(net.hubs[next].id);
      if (cand < dist[next] || (cand == dist[next] && cand_path < path[next])) {
        dist[next] = cand;
        path[next] = std::move(cand_path);
      }
    }
  }
  out_paths = std::move(path);
}

} // namespace

Network build_network(const NetworkSpec& spec) {
  int gateways = 0, locals = 0, accesses = 0;
  std::set<std::string> ids;
  for (const auto& h : spec.hubs) {
    if (!ids.insert(h.id).second)
      throw ConfigError("duplicate hub id: " + h.id);
    switch (h.kind) {
      case HubKind::gateway: ++gateways; break;
      case HubKind::local: ++locals; break;
      case HubKind::access: ++accesses; break;
    }
  }
  if (gateways < 1 || locals < 1 || accesses < 2)
    throw ConfigError("network spec needs >= 1 gateway, >= 1 local and >= 2 access hubs");

  Network net;
  net.hubs = spec.hubs;
  std::sort(net.hubs.begin(), net.hubs.end(),
            [](const Hub& a, const Hub& b) { return a.id < b.id; });

  for (const auto& link : spec.links) {
    if (!ids.count(link.from)) throw ConfigError("unknown hub in link: " + link.from);
    if (!ids.count(link.to)) throw ConfigError("unknown hub in link: " + link.to);
    if (link.from == link.to) throw ConfigError("link endpoints must differ: " + link.from);
    if (link.base_travel_minutes <= 0.0)
      throw ConfigError("link travel minutes must be positive: " + link.from + "," + link.to);
    net.routes.push_back({link.from, link.to, link.base_travel_minutes});
    net.routes.push_back({link.to, link.from, link.base_travel_minutes});
  }
  std::sort(net.routes.begin(), net.routes.end(), [](const Route& a, const Route& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (std::size_t i = 1; i < net.routes.size(); ++i)
    if (net.routes[i].from == net.routes[i - 1].from && net.routes[i].to == net.routes[i - 1].to)
      throw ConfigError("duplicate link: " + net.routes[i].from + "," + net.routes[i].to);

  const std::size_t n = net.hubs.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < n; ++i)
      if (net.hubs[i].id == id) return i;
    throw DataError("unknown hub: " + id);
  };
  for (const auto& r : net.routes)
    adj[index_of(r.from)].emplace_back(index_of(r.to), r.base_travel_minutes);

  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::vector<std::string>> paths;
    shortest_paths_from(net, s, adj, paths);
    for (std::size_t d = 0; d < n; ++d) {
      if (d == s) continue;
      if (paths[d].empty())
        throw ConfigError("network is disconnected: no path " + net.hubs[s].id + " -> " +
                          net.hubs[d].id);
      net.feasible_paths[{net.hubs[s].id, net.hubs[d].id}] = paths[d];
    }
  }
  return net;
}

} // namespace hubcast
