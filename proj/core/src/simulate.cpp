#include "hubcast/simulate.hpp"

#include "hubcast/errors.hpp"
#include "hubcast/rng.hpp"

#include <algorithm>
#include <cmath>

namespace hubcast {

SimConfig SimConfig::from_config(const KeyValueFile& kv) {
  SimConfig cfg;
  cfg.days = static_cast<int>(kv.get_int("days", cfg.days));
  cfg.interval_minutes = static_cast<int>(kv.get_int("interval_minutes", cfg.interval_minutes));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
  cfg.start_day_of_week = static_cast<int>(kv.get_int("start_day_of_week", 0));
  cfg.weekend_multiplier = kv.get_double("weekend_multiplier", 1.0);
  cfg.travel_sigma = kv.get_double("travel_sigma", cfg.travel_sigma);
  cfg.dwell_tod_weight = kv.get_double("dwell_tod_weight", 0.0);

  for (const auto& line : kv.get_all("demand")) {
    auto parts = split_list(line);
    if (parts.size() != 3)
      throw ConfigError(kv.origin() + ": demand needs `origin,dest,per_hour`: " + line);
    cfg.demand.push_back({parts[0], parts[1], parse_double(parts[2], "demand rate")});
  }

  if (auto shape = kv.get("hourly_shape")) {
    auto parts = split_list(*shape);
    if (parts.size() != 24)
      throw ConfigError(kv.origin() + ": hourly_shape needs exactly 24 values");
    for (int h = 0; h < 24; ++h) cfg.hourly_shape[h] = parse_double(parts[h], "hourly_shape");
  } else {
    cfg.hourly_shape.fill(1.0);
  }

  for (const auto& line : kv.get_all("congestion")) {
    for (const auto& pt : split_list(line)) {
      auto colon = pt.find(':');
      if (colon == std::string::npos)
        throw ConfigError(kv.origin() + ": congestion point needs `minute:factor`: " + pt);
      cfg.congestion.emplace_back(
          static_cast<int>(parse_int(pt.substr(0, colon), "congestion minute")),
          parse_double(pt.substr(colon + 1), "congestion factor"));
    }
  }
  std::sort(cfg.congestion.begin(), cfg.congestion.end());

  auto dwell = [&](const char* key, DwellProfile& out) {
    if (auto v = kv.get(key)) {
      auto parts = split_list(*v);
      if (parts.size() != 2)
        throw ConfigError(kv.origin() + ": " + key + " needs `shape,scale`");
      out.shape = parse_double(parts[0], key);
      out.scale = parse_double(parts[1], key);
    }
  };
  dwell("dwell_access", cfg.dwell_access);
  dwell("dwell_local", cfg.dwell_local);
  dwell("dwell_gateway", cfg.dwell_gateway);
  return cfg;
}

SimConfig SimConfig::load(const std::string& path) {
  return from_config(KeyValueFile::parse_file(path));
}

void SimConfig::validate(const Network& net) const {
  if (days < 1) throw ConfigError("sim config: days must be >= 1");
  if (interval_minutes < 1 || 1440 % interval_minutes != 0)
    throw ConfigError("sim config: interval_minutes must divide 1440");
  if (start_day_of_week < 0 || start_day_of_week > 6)
    throw ConfigError("sim config: start_day_of_week must be 0..6");
  if (travel_sigma < 0.0) throw ConfigError("sim config: travel_sigma must be >= 0");
  if (dwell_tod_weight < 0.0 || dwell_tod_weight > 1.0)
    throw ConfigError("sim config: dwell_tod_weight must be in [0,1]");
  for (double v : hourly_shape)
    if (v < 0.0) throw ConfigError("sim config: hourly_shape values must be >= 0");

  double total_rate = 0.0;
  for (const auto& d : demand) {
    if (d.per_hour < 0.0) throw ConfigError("sim config: demand rate must be >= 0");
    if (!net.has_hub(d.origin)) throw ConfigError("sim config: unknown demand origin " + d.origin);
    if (!net.has_hub(d.destination))
      throw ConfigError("sim config: unknown demand destination " + d.destination);
    if (d.origin == d.destination)
      throw ConfigError("sim config: demand origin equals destination: " + d.origin);
    if (d.per_hour > 0.0 && !net.feasible_paths.count({d.origin, d.destination}))
      throw ConfigError("sim config: no path for demand pair " + d.origin + "," + d.destination);
    double peak = *std::max_element(hourly_shape.begin(), hourly_shape.end());
    if (d.per_hour * peak * std::max(1.0, weekend_multiplier) > 600.0)
      throw ConfigError("sim config: hourly demand rate too large: " + d.origin + "," +
                        d.destination);
    total_rate += d.per_hour;
  }
  if (total_rate > 0.0 && net.routes.empty())
    throw ConfigError("sim config: nonzero demand on a network without routes");
}

double SimConfig::congestion_factor(long long minute_of_day) const {
  if (congestion.empty()) return 1.0;
  if (congestion.size() == 1) return congestion.front().second;
  double m = static_cast<double>(minute_of_day % 1440);
  // Wrap the control polygon around midnight.
  auto [m0, v0] = congestion.back();
  double prev_m = m0 - 1440.0, prev_v = v0;
  for (const auto& [cm, cv] : congestion) {
    if (m <= cm) {
      double span = cm - prev_m;
      double w = span > 0.0 ? (m - prev_m) / span : 0.0;
      return prev_v + w * (cv - prev_v);
    }
    prev_m = cm;
    prev_v = cv;
  }
  auto [first_m, first_v] = congestion.front();
  double span = (first_m + 1440.0) - prev_m;
  double w = span > 0.0 ? (m - prev_m) / span : 0.0;
  return prev_v + w * (first_v - prev_v);
}

const DwellProfile& SimConfig::dwell_profile(HubKind kind) const {
  switch (kind) {
    case HubKind::access: return dwell_access;
    case HubKind::local: return dwell_local;
    case HubKind::gateway: return dwell_gateway;
  }
  return dwell_access;
}

namespace {

struct PendingOrder {
  long long order_time;
  std::size_t demand_index;
  std::uint64_t journey_seed;
};

long long positive_minutes(double value) {
  return std::max<long long>(1, std::llround(value));
}

} // namespace

std::vector<ParcelRecord> simulate(const Network& net, const SimConfig& cfg) {
  cfg.validate(net);

  std::vector<PendingOrder> orders;
  for (std::size_t di = 0; di < cfg.demand.size(); ++di) {
    const auto& d = cfg.demand[di];
    if (d.per_hour <= 0.0) continue;
    std::uint64_t pair_seed = mix_seed(cfg.seed, hash_tag(d.origin + ">" + d.destination));
    for (int day = 0; day < cfg.days; ++day) {
      double dow_mult = cfg.is_weekend(static_cast<long long>(day) * 1440)
                            ? cfg.weekend_multiplier
                            : 1.0;
      for (int hour = 0; hour < 24; ++hour) {
        double lambda = d.per_hour * cfg.hourly_shape[hour] * dow_mult;
        Rng seg(mix_seed(pair_seed, static_cast<std::uint64_t>(day) * 24 + hour));
        long long count = seg.poisson(lambda);
        for (long long i = 0; i < count; ++i) {
          long long minute = static_cast<long long>(day) * 1440 + hour * 60 +
                             static_cast<long long>(seg.uniform() * 60.0);
          orders.push_back({minute, di,
                            mix_seed(pair_seed, mix_seed(static_cast<std::uint64_t>(day) * 24 + hour,
                                                         static_cast<std::uint64_t>(i) + 1))});
        }
      }
    }
  }

  std::sort(orders.begin(), orders.end(), [&](const PendingOrder& a, const PendingOrder& b) {
    if (a.order_time != b.order_time) return a.order_time < b.order_time;
    const auto& da = cfg.demand[a.demand_index];
    const auto& db = cfg.demand[b.demand_index];
    return std::tie(da.origin, da.destination, a.journey_seed) <
           std::tie(db.origin, db.destination, b.journey_seed);
  });

  std::vector<ParcelRecord> records;
  records.reserve(orders.size());
  for (std::size_t id = 0; id < orders.size(); ++id) {
    const auto& o = orders[id];
    const auto& d = cfg.demand[o.demand_index];
    ParcelRecord r;
    r.parcel_id = static_cast<long long>(id);
    r.order_time = o.order_time;
    r.origin = d.origin;
    r.destination = d.destination;
    r.path = net.path(d.origin, d.destination);

    Rng jr(o.journey_seed);
    long long t = o.order_time; // parcel is dropped at the origin hub when ordered
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      ParcelEvent hub_event;
      hub_event.location = r.path[k];
      hub_event.arrival = t;
      if (k + 1 == r.path.size()) {
        r.events.push_back(std::move(hub_event)); // delivered; no departure
        break;
      }
      const auto& profile = cfg.dwell_profile(net.hub(r.path[k]).kind);
      double tod = (1.0 - cfg.dwell_tod_weight) +
                   cfg.dwell_tod_weight * cfg.congestion_factor(t % 1440);
      long long dwell = positive_minutes(jr.gamma(profile.shape, profile.scale) * tod);
      hub_event.departure = t + dwell;
      r.events.push_back(std::move(hub_event));
      t += dwell;

      const Route& route = net.route(r.path[k], r.path[k + 1]);
      double factor = cfg.congestion_factor(t % 1440);
      long long travel = positive_minutes(route.base_travel_minutes * factor *
                                          jr.lognormal_unit(cfg.travel_sigma));
      r.events.push_back({route.id(), t, t + travel});
      t += travel;
    }
    records.push_back(std::move(r));
  }
  return records;
}

} // namespace hubcast
