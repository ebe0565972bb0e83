#include "hubcast/forest.hpp"

#include "hubcast/errors.hpp"
#include "hubcast/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hubcast {

double RegressionTree::predict(const std::vector<double>& x) const {
  if (nodes.empty()) throw DataError("regression tree has no nodes");
  int at = 0;
  for (;;) {
    const Node& node = nodes[static_cast<std::size_t>(at)];
    if (node.leaf) return node.value;
    bool go_left = node.categorical ? x[static_cast<std::size_t>(node.feature)] == node.threshold
                                    : x[static_cast<std::size_t>(node.feature)] <= node.threshold;
    at = go_left ? node.left : node.right;
  }
}

double Forest::predict(const std::vector<double>& x) const {
  if (trees.empty()) throw DataError("forest has no trees");
  if (x.size() != schema.dimension())
    throw ShapeError("forest: query has dim " + std::to_string(x.size()) + ", schema expects " +
                     std::to_string(schema.dimension()));
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

// Rows with identical feature vectors are collapsed into weighted groups;
// split statistics on groups are exact for variance-reduction CART and
// make tiny-cardinality features (hours, weekdays) cheap to fit.
struct Group {
  std::vector<double> features;
  double weight = 0.0; // bootstrap multiplicity
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  bool categorical = false;
  double reduction = 0.0;
};

struct Accum {
  double weight = 0.0, sum = 0.0, sum_sq = 0.0;
  void add(const Group& g) {
    weight += g.weight;
    sum += g.sum;
    sum_sq += g.sum_sq;
  }
  void add(const Accum& other) {
    weight += other.weight;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
  double sse() const { return weight > 0.0 ? sum_sq - sum * sum / weight : 0.0; }
  double mean() const { return weight > 0.0 ? sum / weight : 0.0; }
};

class TreeBuilder {
public:
  TreeBuilder(const std::vector<Group>& groups, const FeatureSchema& schema, int m, int min_leaf,
              Rng& rng)
      : groups_(groups), schema_(schema), m_(m), min_leaf_(min_leaf), rng_(rng) {}

  RegressionTree build(std::vector<int> member_indices) {
    RegressionTree tree;
    grow(std::move(member_indices), tree);
    return tree;
  }

private:
  int grow(std::vector<int> members, RegressionTree& tree) {
    Accum total;
    for (int gi : members) total.add(groups_[static_cast<std::size_t>(gi)]);

    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.back().value = total.mean();

    SplitChoice split = choose_split(members, total);
    if (!split.found) return node_index;

    std::vector<int> left, right;
    for (int gi : members) {
      const Group& g = groups_[static_cast<std::size_t>(gi)];
      double v = g.features[static_cast<std::size_t>(split.feature)];
      bool go_left = split.categorical ? v == split.threshold : v <= split.threshold;
      (go_left ? left : right).push_back(gi);
    }
    members.clear();
    members.shrink_to_fit();

    int left_index = grow(std::move(left), tree);
    int right_index = grow(std::move(right), tree);
    RegressionTree::Node& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.categorical = split.categorical;
    node.left = left_index;
    node.right = right_index;
    return node_index;
  }

  SplitChoice choose_split(const std::vector<int>& members, const Accum& total) {
    SplitChoice best;
    if (total.weight < 2.0 * min_leaf_ || total.sse() <= 1e-12) return best;

    const int d = static_cast<int>(schema_.dimension());
    std::vector<int> candidates(static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) candidates[static_cast<std::size_t>(f)] = f;
    // Seeded partial Fisher-Yates: the first m_ entries are this node's
    // feature subset. Consumed in a fixed preorder walk, so fits are
    // reproducible.
    for (int i = 0; i < m_ && i < d; ++i) {
      int j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(d - i)));
      std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(j)]);
    }
    std::vector<int> subset(candidates.begin(), candidates.begin() + std::min(m_, d));
    std::sort(subset.begin(), subset.end()); // evaluation order fixes tie-breaks

    for (int f : subset) {
      // Distinct observed values in this node, with aggregated stats.
      std::vector<std::pair<double, Accum>> by_value;
      for (int gi : members) {
        const Group& g = groups_[static_cast<std::size_t>(gi)];
        double v = g.features[static_cast<std::size_t>(f)];
        auto it = std::find_if(by_value.begin(), by_value.end(),
                               [&](const auto& p) { return p.first == v; });
        if (it == by_value.end()) {
          by_value.emplace_back(v, Accum{});
          it = by_value.end() - 1;
        }
        it->second.add(g);
      }
      if (by_value.size() < 2) continue;
      std::sort(by_value.begin(), by_value.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      if (schema_.kinds[static_cast<std::size_t>(f)] == FeatureKind::categorical) {
        for (const auto& [value, in] : by_value) {
          Accum out;
          out.weight = total.weight - in.weight;
          out.sum = total.sum - in.sum;
          out.sum_sq = total.sum_sq - in.sum_sq;
          consider(best, f, value, true, total, in, out);
        }
      } else {
        Accum below;
        for (std::size_t i = 0; i + 1 < by_value.size(); ++i) {
          below.add(by_value[i].second);
          Accum above;
          above.weight = total.weight - below.weight;
          above.sum = total.sum - below.sum;
          above.sum_sq = total.sum_sq - below.sum_sq;
          consider(best, f, by_value[i].first, false, total, below, above);
        }
      }
    }
    return best;
  }

  void consider(SplitChoice& best, int feature, double threshold, bool categorical,
                const Accum& total, const Accum& left, const Accum& right) {
    if (left.weight < min_leaf_ || right.weight < min_leaf_) return;
    double reduction = total.sse() - left.sse() - right.sse();
    if (reduction <= 1e-12) return;
    // Strictly-better wins; subset evaluation order handles exact ties.
    if (!best.found || reduction > best.reduction) {
      best.found = true;
      best.feature = feature;
      best.threshold = threshold;
      best.categorical = categorical;
      best.reduction = reduction;
    }
  }

  const std::vector<Group>& groups_;
  const FeatureSchema& schema_;
  int m_;
  int min_leaf_;
  Rng& rng_;
};

} // namespace

Forest fit_forest(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets,
                  const FeatureSchema& schema, const ForestFitOptions& options) {
  if (rows.empty()) throw TrainError("forest fit: empty sample set");
  if (rows.size() != targets.size())
    throw ShapeError("forest fit: rows and targets differ in length");
  const int d = static_cast<int>(schema.dimension());
  if (d < 1) throw ShapeError("forest fit: schema has no features");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != d) throw ShapeError("forest fit: row does not match schema");
  if (options.tree_count < 1) throw ConfigError("forest fit: tree_count must be >= 1");
  int m = options.features_per_split == 0 ? std::max(1, d / 3) : options.features_per_split;
  if (m < 1 || m > d) throw ConfigError("forest fit: features_per_split must be in [1, d]");
  if (options.min_leaf < 1) throw ConfigError("forest fit: min_leaf must be >= 1");

  // Collapse identical feature vectors once; bootstrap draws then only
  // adjust group weights.
  std::vector<Group> groups;
  std::map<std::vector<double>, std::size_t> group_of;
  std::vector<std::size_t> row_group(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = group_of.try_emplace(rows[i], groups.size());
    if (inserted) {
      Group g;
      g.features = rows[i];
      groups.push_back(std::move(g));
    }
    row_group[i] = it->second;
  }

  const std::size_t n = rows.size();
  Forest forest;
  forest.schema = schema;
  forest.features_per_split = m;
  forest.trees.resize(static_cast<std::size_t>(options.tree_count));

  for (int k = 0; k < options.tree_count; ++k) {
    Rng rng(mix_seed(options.seed, mix_seed(hash_tag("forest-tree"), static_cast<std::uint64_t>(k))));
    std::vector<Group> bagged = groups;
    for (auto& g : bagged) {
      g.weight = 0.0;
      g.sum = 0.0;
      g.sum_sq = 0.0;
    }
    if (options.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t pick = static_cast<std::size_t>(rng.below(n));
        Group& g = bagged[row_group[pick]];
        g.weight += 1.0;
        g.sum += targets[pick];
        g.sum_sq += targets[pick] * targets[pick];
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        Group& g = bagged[row_group[i]];
        g.weight += 1.0;
        g.sum += targets[i];
        g.sum_sq += targets[i] * targets[i];
      }
    }
    std::vector<int> members;
    for (std::size_t gi = 0; gi < bagged.size(); ++gi)
      if (bagged[gi].weight > 0.0) members.push_back(static_cast<int>(gi));
    if (members.empty()) { // possible only for pathological bootstrap draws
      RegressionTree stub;
      stub.nodes.emplace_back();
      forest.trees[static_cast<std::size_t>(k)] = std::move(stub);
      continue;
    }
    TreeBuilder builder(bagged, schema, m, options.min_leaf, rng);
    forest.trees[static_cast<std::size_t>(k)] = builder.build(std::move(members));
  }
  return forest;
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open forest file for writing: " + path);
  out << "#hubcast-forest v1\n";
  out << "schema";
  for (std::size_t i = 0; i < forest.schema.dimension(); ++i)
    out << ' ' << forest.schema.names[i] << ':'
        << (forest.schema.kinds[i] == FeatureKind::numeric ? "num" : "cat");
  out << "\n";
  out << "trees " << forest.trees.size() << " m " << forest.features_per_split << "\n";
  char buf[40];
  for (const auto& tree : forest.trees) {
    out << "tree " << tree.nodes.size() << "\n";
    for (const auto& n : tree.nodes) {
      if (n.leaf) {
        std::snprintf(buf, sizeof(buf), "%.17g", n.value);
        out << "leaf " << buf << "\n";
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", n.threshold);
        out << "split " << n.feature << ' ' << (n.categorical ? "cat" : "num") << ' ' << buf << ' '
            << n.left << ' ' << n.right << "\n";
      }
    }
  }
  if (!out) throw DataError("failed writing forest file: " + path);
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open forest file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#hubcast-forest v1")
    throw DataError(path + ": unsupported forest header");
  Forest forest;
  if (!std::getline(in, line)) throw DataError(path + ": missing schema");
  {
    std::istringstream ss(line);
    std::string tag, item;
    ss >> tag;
    if (tag != "schema") throw DataError(path + ": missing schema");
    while (ss >> item) {
      auto colon = item.rfind(':');
      if (colon == std::string::npos) throw DataError(path + ": bad schema entry " + item);
      forest.schema.names.push_back(item.substr(0, colon));
      forest.schema.kinds.push_back(item.substr(colon + 1) == "num" ? FeatureKind::numeric
                                                                    : FeatureKind::categorical);
    }
  }
  std::size_t tree_count = 0;
  if (!std::getline(in, line)) throw DataError(path + ": missing tree count");
  {
    std::istringstream ss(line);
    std::string tag, mtag;
    ss >> tag >> tree_count >> mtag >> forest.features_per_split;
    if (tag != "trees" || mtag != "m") throw DataError(path + ": bad tree count line");
  }
  for (std::size_t t = 0; t < tree_count; ++t) {
    if (!std::getline(in, line)) throw DataError(path + ": truncated tree list");
    std::istringstream ss(line);
    std::string tag;
    std::size_t node_count = 0;
    ss >> tag >> node_count;
    if (tag != "tree") throw DataError(path + ": bad tree line");
    RegressionTree tree;
    for (std::size_t i = 0; i < node_count; ++i) {
      if (!std::getline(in, line)) throw DataError(path + ": truncated node list");
      std::istringstream ns(line);
      std::string kind;
      ns >> kind;
      RegressionTree::Node node;
      if (kind == "leaf") {
        ns >> node.value;
      } else if (kind == "split") {
        std::string cat;
        node.leaf = false;
        ns >> node.feature >> cat >> node.threshold >> node.left >> node.right;
        node.categorical = cat == "cat";
      } else {
        throw DataError(path + ": bad node line: " + line);
      }
      if (!ns) throw DataError(path + ": bad node line: " + line);
      tree.nodes.push_back(node);
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

std::vector<TimeSample> collect_time_samples(const EventLog& log, long long observation_time,
                                             bool routes) {
  std::vector<TimeSample> samples;
  for (const auto& r : log.records()) {
    for (const auto& e : r.events) {
      if (e.is_route() != routes) continue;
      if (!e.departure || *e.departure >= observation_time) continue; // completed strictly before
      TimeSample s;
      s.entity = e.location;
      s.time_of_day = static_cast<int>((e.arrival % 1440) / 60);
      s.day_of_week =
          static_cast<int>(((e.arrival / 1440) + log.start_day_of_week()) % 7);
      s.target = static_cast<double>(*e.departure - e.arrival);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

namespace {

FeatureSchema time_schema() {
  return {{"time_of_day", "day_of_week"}, {FeatureKind::numeric, FeatureKind::categorical}};
}

} // namespace

TimeModels fit_time_models(const EventLog& log, long long observation_time,
                           const TimeModelOptions& options) {
  TimeModels models;
  models.fitted_at = observation_time;

  auto fit_class = [&](bool routes, double& class_mean, std::map<std::string, Forest>& out) {
    auto samples = collect_time_samples(log, observation_time, routes);
    double total = 0.0;
    std::map<std::string, std::pair<std::vector<std::vector<double>>, std::vector<double>>> grouped;
    for (const auto& s : samples) {
      total += s.target;
      auto& slot = grouped[s.entity];
      slot.first.push_back({static_cast<double>(s.time_of_day), static_cast<double>(s.day_of_week)});
      slot.second.push_back(s.target);
    }
    class_mean = samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
    for (auto& [entity, data] : grouped) {
      if (static_cast<int>(data.second.size()) < options.min_samples) continue;
      ForestFitOptions fit_options = options.forest;
      fit_options.seed = mix_seed(options.forest.seed, hash_tag(entity));
      out.emplace(entity, fit_forest(data.first, data.second, time_schema(), fit_options));
    }
  };
  fit_class(false, models.hub_class_mean, models.dwell);
  fit_class(true, models.route_class_mean, models.travel);

  auto tabulate = [](const std::map<std::string, Forest>& forests,
                     std::map<std::string, std::array<double, 168>>& tables) {
    for (const auto& [entity, forest] : forests) {
      std::array<double, 168> table{};
      for (int tod = 0; tod < 24; ++tod)
        for (int dow = 0; dow < 7; ++dow)
          table[static_cast<std::size_t>(tod * 7 + dow)] =
              forest.predict({static_cast<double>(tod), static_cast<double>(dow)});
      tables.emplace(entity, table);
    }
  };
  tabulate(models.dwell, models.dwell_table);
  tabulate(models.travel, models.travel_table);
  return models;
}

namespace {

std::size_t grid_index(int time_of_day, int day_of_week) {
  int tod = std::clamp(time_of_day, 0, 23);
  int dow = std::clamp(day_of_week, 0, 6);
  return static_cast<std::size_t>(tod * 7 + dow);
}

} // namespace

double TimeModels::predict_dwell(const std::string& hub, int time_of_day, int day_of_week) const {
  if (auto it = dwell_table.find(hub); it != dwell_table.end())
    return it->second[grid_index(time_of_day, day_of_week)];
  auto it = dwell.find(hub);
  if (it == dwell.end()) return hub_class_mean;
  return it->second.predict({static_cast<double>(time_of_day), static_cast<double>(day_of_week)});
}

double TimeModels::predict_travel(const std::string& route_id, int time_of_day,
                                  int day_of_week) const {
  if (auto it = travel_table.find(route_id); it != travel_table.end())
    return it->second[grid_index(time_of_day, day_of_week)];
  auto it = travel.find(route_id);
  if (it == travel.end()) return route_class_mean;
  return it->second.predict({static_cast<double>(time_of_day), static_cast<double>(day_of_week)});
}

} // namespace hubcast
