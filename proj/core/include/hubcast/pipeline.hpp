#pragma once

#include "hubcast/datastore.hpp"
#include "hubcast/dense_net.hpp"
#include "hubcast/destshare.hpp"
#include "hubcast/metrics.hpp"
#include "hubcast/network.hpp"
#include "hubcast/ordered.hpp"
#include "hubcast/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hubcast {

/// The five comparison methods the pipeline can score.
extern const std::vector<std::string> kKnownMethods;

/**
 * Resolved run settings. Loaded from a key/value file; the CLI can
 * override the seed and output directory, and HUBCAST_OUT_DIR overrides
 * the output directory from the environment.
 */
struct RunConfig {
  std::string network_path;
  std::string sim_path;
  std::string log_path; // empty: simulate into out_dir
  std::string out_dir = "out";
  std::string target_hub;
  int interval_minutes = 15;
  int horizon_periods = 96; // T + 1
  std::vector<std::string> methods;
  int train_days = 27;
  int test_days = 3;
  int holdout_days = 3; // tail of the training window kept for validation
  TrainConfig ann_train;      // defaults: lr 0.05, 500 epochs, decay 0.01
  TrainConfig ensemble_train; // defaults: lr 0.01, 500 epochs, decay 0.01
  std::uint64_t forest_seed = 0;
  int forest_trees = 100;
  int forest_min_leaf = 5;
  long long rf_refit_minutes = 1440;
  double destshare_alpha = 0.3;
  ShareConvention destshare_convention = ShareConvention::weight_new;
  long long series_observation = -1; // -1: first test day, 16:00
  bool dry_run = false;

  static RunConfig load(const std::string& path);
  void validate() const;

  long long train_end() const { return static_cast<long long>(train_days) * 1440; }
  long long test_end() const { return static_cast<long long>(train_days + test_days) * 1440; }
  long long fit_end() const {
    return static_cast<long long>(train_days - holdout_days) * 1440;
  }
  IntervalSpec spec_template() const { return {interval_minutes, horizon_periods - 1, 0}; }
};

struct SimulateOutput {
  std::string log_path;
  std::string manifest_path;
  std::size_t parcel_count = 0;
};

/// Builds the network, runs the generator, writes the event log and a
/// manifest capturing the seed and config hashes.
SimulateOutput cmd_simulate(const std::string& network_path, const std::string& sim_path,
                            const std::string& out_dir, long long seed_override = -1);

/// Per-forecast conservation evidence for the Type II replay.
struct ConservationRow {
  long long observation_time = 0;
  long long binned_total = 0; // counts sum + overflow
  long long snapshot_size = 0;
};

struct PipelineResult {
  std::vector<MethodReport> reports;
  ReportPaths report_paths;
  std::string records_path;
  std::string manifest_path;
  std::string log_path;
  std::vector<ConservationRow> test_conservation;
  double naive_test_mae = 0.0;
  double elapsed_seconds = 0.0;
};

/**
 * Full walk-forward study: simulate (or load) the log, train the
 * requested methods on the first train_days - holdout_days days, replay
 * the holdout window for validation records and bands, replay the test
 * days at I-minute cadence, and write records, report files and a
 * manifest. Scored (t_o, horizon) pairs stop at the demand horizon so
 * every method is pooled over the identical scope.
 */
PipelineResult run_pipeline(const RunConfig& cfg);

struct DestShareOutput {
  DestShareState initial;
  DestShareState final_state;
  std::string initial_path;
  std::string final_path;
  std::string allocation_path;
};

/// Destination-share study: initialize over the training observation
/// times, walk the test observation times (allocate, then update), and
/// write the share matrices plus the last allocation.
DestShareOutput run_destshare(const RunConfig& cfg);

/// Re-renders the report files from a saved records file.
ReportPaths render_report(const std::string& records_path, const std::string& out_dir);

} // namespace hubcast
