#pragma once

#include "hubcast/datastore.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hubcast {

enum class FeatureKind { numeric, categorical };

struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<FeatureKind> kinds;

  std::size_t dimension() const { return names.size(); }
};

/**
 * CART regression tree. Numeric nodes route x[feature] <= threshold to the
 * left child; categorical nodes route x[feature] == threshold to the left
 * child. Leaves hold the mean target of their training rows.
 */
struct RegressionTree {
  struct Node {
    bool leaf = true;
    double value = 0.0;      // leaf mean
    int feature = -1;        // split feature index
    double threshold = 0.0;  // numeric cut or category code
    bool categorical = false;
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes; // preorder; root at 0

  double predict(const std::vector<double>& x) const;
};

/// Bagged regression trees; the prediction is the plain mean over trees.
struct Forest {
  FeatureSchema schema;
  std::vector<RegressionTree> trees;
  int features_per_split = 1;

  double predict(const std::vector<double>& x) const;
};

struct ForestFitOptions {
  int tree_count = 100;
  int features_per_split = 0; // 0 -> max(1, d/3)
  int min_leaf = 5;
  std::uint64_t seed = 0;
  bool bootstrap = true; // disabled only in degenerate-ensemble tests
};

/**
 * Fits bagged CART trees: each tree trains on n draws with replacement,
 * each split maximizes variance reduction over a seeded random subset of
 * features, with thresholds taken from observed feature values. Ties break
 * toward the lowest feature index, then the smallest threshold.
 * Deterministic for fixed (rows, options).
 */
Forest fit_forest(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets,
                  const FeatureSchema& schema, const ForestFitOptions& options);

/// Versioned text round-trip (preorder node list per tree).
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

/// One observed dwell or travel duration from the event log.
struct TimeSample {
  std::string entity; // hub id or route id
  int time_of_day = 0;  // hour 0-23 of entering the location
  int day_of_week = 0;  // 0-6
  double target = 0.0;  // minutes
};

/**
 * Per-entity duration models. Entities with fewer than min_samples
 * completed visits fall back to the mean duration of their class (all
 * hubs or all routes); a class with no history at all predicts 0.
 *
 * The feature grid is tiny (24 hours x 7 weekdays), so fitting also
 * tabulates every forest over the grid; predict_* is then a lookup with
 * values identical to Forest::predict.
 */
struct TimeModels {
  std::map<std::string, Forest> dwell;
  std::map<std::string, Forest> travel;
  std::map<std::string, std::array<double, 168>> dwell_table;
  std::map<std::string, std::array<double, 168>> travel_table;
  double hub_class_mean = 0.0;
  double route_class_mean = 0.0;
  long long fitted_at = 0;

  double predict_dwell(const std::string& hub, int time_of_day, int day_of_week) const;
  double predict_travel(const std::string& route_id, int time_of_day, int day_of_week) const;
};

struct TimeModelOptions {
  ForestFitOptions forest;
  int min_samples = 10;
};

/// Extracts completed dwell/travel observations strictly before t_o.
std::vector<TimeSample> collect_time_samples(const EventLog& log, long long observation_time,
                                             bool routes);

/// Trains one dwell forest per hub and one travel forest per route, using
/// only events completed strictly before t_o.
TimeModels fit_time_models(const EventLog& log, long long observation_time,
                           const TimeModelOptions& options);

} // namespace hubcast
