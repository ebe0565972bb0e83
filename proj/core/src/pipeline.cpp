#include "hubcast/pipeline.hpp"

#include "hubcast/baselines.hpp"
#include "hubcast/ensemble.hpp"
#include "hubcast/errors.hpp"
#include "hubcast/unordered.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace hubcast {

const std::vector<std::string> kKnownMethods = {"naive", "holt_winters", "ann_direct",
                                                "ensemble_sum", "ensemble_ann"};

namespace {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const TrainError& e) {
    throw TrainError("stage " + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + name + ": " + e.what());
  }
}

bool wants(const RunConfig& cfg, const std::string& method) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), method) != cfg.methods.end();
}

} // namespace

RunConfig RunConfig::load(const std::string& path) {
  KeyValueFile kv = KeyValueFile::parse_file(path);
  RunConfig cfg;
  cfg.network_path = kv.require("network");
  cfg.sim_path = kv.require("sim");
  cfg.log_path = kv.get_string("log", "");
  cfg.out_dir = kv.get_string("out_dir", cfg.out_dir);
  cfg.target_hub = kv.require("target_hub");
  cfg.interval_minutes = static_cast<int>(kv.get_int("interval_minutes", cfg.interval_minutes));
  cfg.horizon_periods = static_cast<int>(kv.get_int("horizon_periods", cfg.horizon_periods));
  if (auto methods = kv.get("methods"))
    cfg.methods = split_list(*methods);
  else
    cfg.methods = kKnownMethods;
  cfg.train_days = static_cast<int>(kv.get_int("train_days", cfg.train_days));
  cfg.test_days = static_cast<int>(kv.get_int("test_days", cfg.test_days));
  cfg.holdout_days = static_cast<int>(kv.get_int("holdout_days", cfg.holdout_days));

  cfg.ann_train.learning_rate = kv.get_double("ann_learning_rate", 0.05);
  cfg.ann_train.epochs = static_cast<int>(kv.get_int("ann_epochs", 500));
  cfg.ann_train.weight_decay = kv.get_double("ann_weight_decay", 0.01);
  cfg.ann_train.batch_size = static_cast<int>(kv.get_int("ann_batch_size", 0));
  cfg.ann_train.seed = static_cast<std::uint64_t>(kv.get_int("ann_seed", 1001));

  cfg.ensemble_train.learning_rate = kv.get_double("ensemble_learning_rate", 0.01);
  cfg.ensemble_train.epochs = static_cast<int>(kv.get_int("ensemble_epochs", 500));
  cfg.ensemble_train.weight_decay = kv.get_double("ensemble_weight_decay", 0.01);
  cfg.ensemble_train.batch_size = static_cast<int>(kv.get_int("ensemble_batch_size", 0));
  cfg.ensemble_train.seed = static_cast<std::uint64_t>(kv.get_int("ensemble_seed", 1002));

  cfg.forest_seed = static_cast<std::uint64_t>(kv.get_int("forest_seed", 1003));
  cfg.forest_trees = static_cast<int>(kv.get_int("forest_trees", 100));
  cfg.forest_min_leaf = static_cast<int>(kv.get_int("forest_min_leaf", 5));
  cfg.rf_refit_minutes = kv.get_int("rf_refit_minutes", 1440);
  cfg.destshare_alpha = kv.get_double("destshare_alpha", 0.3);
  std::string convention = kv.get_string("destshare_convention", "algorithm");
  if (convention == "algorithm")
    cfg.destshare_convention = ShareConvention::weight_new;
  else if (convention == "equation")
    cfg.destshare_convention = ShareConvention::weight_old;
  else
    throw ConfigError(path + ": destshare_convention must be `algorithm` or `equation`");
  cfg.series_observation = kv.get_int("series_observation", -1);

  if (const char* env_out = std::getenv("HUBCAST_OUT_DIR"); env_out && *env_out)
    cfg.out_dir = env_out;
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (network_path.empty() || sim_path.empty())
    throw ConfigError("run config: network and sim paths are required");
  if (target_hub.empty()) throw ConfigError("run config: target_hub is required");
  if (interval_minutes < 1 || 1440 % interval_minutes != 0)
    throw ConfigError("run config: interval_minutes must divide 1440");
  if (horizon_periods < 1) throw ConfigError("run config: horizon_periods must be >= 1");
  if (methods.empty()) throw ConfigError("run config: methods list is empty");
  for (const auto& m : methods)
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end())
      throw ConfigError("run config: unknown method `" + m + "`");
  if (std::set<std::string>(methods.begin(), methods.end()).size() != methods.size())
    throw ConfigError("run config: duplicate method in list");
  if (holdout_days < 1) throw ConfigError("run config: holdout_days must be >= 1");
  if (train_days - holdout_days < 3)
    throw ConfigError("run config: train_days must leave >= 3 days before the holdout window");
  if (test_days < 1) throw ConfigError("run config: test_days must be >= 1");
  ann_train.validate();
  ensemble_train.validate();
  if (forest_trees < 1) throw ConfigError("run config: forest_trees must be >= 1");
  if (forest_min_leaf < 1) throw ConfigError("run config: forest_min_leaf must be >= 1");
  if (rf_refit_minutes < 1) throw ConfigError("run config: rf_refit_minutes must be >= 1");
  if (destshare_alpha < 0.0 || destshare_alpha > 1.0)
    throw ConfigError("run config: destshare_alpha must lie in [0,1]");
}

namespace {

struct PreparedInputs {
  Network net;
  SimConfig sim;
  EventLog log;
  std::string log_path;
  bool simulated = false;
};

PreparedInputs prepare_inputs(const RunConfig& cfg) {
  Network net = build_network(NetworkSpec::load(cfg.network_path));
  SimConfig sim = SimConfig::load(cfg.sim_path);
  if (!cfg.log_path.empty()) {
    return {std::move(net), sim, EventLog::load(cfg.log_path, sim.start_day_of_week),
            cfg.log_path, false};
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::string log_path = cfg.out_dir + "/events.log";
  auto records = simulate(net, sim);
  write_event_log(log_path, records);
  return {std::move(net), sim, EventLog(std::move(records), sim.start_day_of_week), log_path,
          true};
}

void require_hub_arrivals(const PreparedInputs& inputs, const std::string& hub) {
  if (!inputs.net.has_hub(hub)) throw DataError("target hub not in network: " + hub);
  auto seen = inputs.log.hubs_seen();
  if (std::find(seen.begin(), seen.end(), hub) == seen.end())
    throw DataError("target hub has no arrivals in the log: " + hub);
}

void write_manifest_file(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << "#hubcast-manifest v1\n";
  for (const auto& line : lines) out << line << "\n";
}

} // namespace

SimulateOutput cmd_simulate(const std::string& network_path, const std::string& sim_path,
                            const std::string& out_dir, long long seed_override) {
  Network net = build_network(NetworkSpec::load(network_path));
  SimConfig sim = SimConfig::load(sim_path);
  if (seed_override >= 0) sim.seed = static_cast<std::uint64_t>(seed_override);
  std::filesystem::create_directories(out_dir);

  SimulateOutput out;
  out.log_path = out_dir + "/events.log";
  auto records = simulate(net, sim);
  out.parcel_count = records.size();
  write_event_log(out.log_path, records);

  out.manifest_path = out_dir + "/simulate_manifest.txt";
  write_manifest_file(out.manifest_path,
                      {"network " + network_path + " " + file_hash_hex(network_path),
                       "sim " + sim_path + " " + file_hash_hex(sim_path),
                       "seed " + std::to_string(sim.seed),
                       "days " + std::to_string(sim.days),
                       "parcels " + std::to_string(out.parcel_count),
                       "log " + out.log_path + " " + file_hash_hex(out.log_path)});
  return out;
}

namespace {

// Scored horizons for one observation time: the pool stops at the phase
// boundary so every method covers the identical (t_o, t) set.
int pooled_horizons(const RunConfig& cfg, long long t_o, long long phase_end) {
  long long fit = (phase_end - t_o) / cfg.interval_minutes;
  return static_cast<int>(std::min<long long>(cfg.horizon_periods, fit));
}

std::vector<long long> observation_grid(long long from, long long to, int step) {
  std::vector<long long> out;
  for (long long t = from; t < to; t += step) out.push_back(t);
  return out;
}

struct MethodSeries {
  // forecasts[i] aligns with the observation grid of its phase
  std::vector<std::vector<double>> validation;
  std::vector<std::vector<double>> test;
};

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  auto t_start = std::chrono::steady_clock::now();
  PipelineResult result;

  PreparedInputs inputs = stage("load", [&] { return prepare_inputs(cfg); });
  stage("load", [&] {
    require_hub_arrivals(inputs, cfg.target_hub);
    return 0;
  });

  const IntervalSpec tmpl = cfg.spec_template();
  const auto val_grid = observation_grid(cfg.fit_end(), cfg.train_end(), cfg.interval_minutes);
  const auto test_grid = observation_grid(cfg.train_end(), cfg.test_end(), cfg.interval_minutes);
  long long series_t_o =
      cfg.series_observation >= 0 ? cfg.series_observation : cfg.train_end() + 960;

  if (cfg.dry_run) {
    std::cout << "plan: log=" << inputs.log_path << (inputs.simulated ? " (simulated)" : "")
              << "\n";
    std::cout << "plan: target_hub=" << cfg.target_hub << " I=" << cfg.interval_minutes
              << " horizon=" << cfg.horizon_periods << "\n";
    std::cout << "plan: fit=[0," << cfg.fit_end() << ") validation=[" << cfg.fit_end() << ","
              << cfg.train_end() << ") test=[" << cfg.train_end() << "," << cfg.test_end()
              << ")\n";
    std::cout << "plan: methods=";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
      std::cout << (i ? "," : "") << cfg.methods[i];
    std::cout << "\nplan: seeds ann=" << cfg.ann_train.seed
              << " ensemble=" << cfg.ensemble_train.seed << " forest=" << cfg.forest_seed << "\n";
    std::cout << "plan: out_dir=" << cfg.out_dir << " (dry run: nothing written)\n";
    return result;
  }

  const bool needs_submodels = wants(cfg, "ensemble_sum") || wants(cfg, "ensemble_ann");

  // ---

  UnorderedModel unordered_model;
  UnorderedModel direct_model;
  HoltWintersState hw_params;
  stage("train", [&] {
    if (needs_submodels) {
      auto training = build_training_set(inputs.log, cfg.target_hub, tmpl, cfg.train_days);
      unordered_model =
          fit_unordered(training.slice(0, cfg.fit_end()), tmpl, cfg.ann_train);
    }
    if (wants(cfg, "ann_direct")) {
      auto training = build_total_training_set(inputs.log, cfg.target_hub, tmpl, cfg.train_days);
      direct_model = fit_unordered(training.slice(0, cfg.fit_end()), tmpl, cfg.ann_train);
    }
    if (wants(cfg, "holt_winters")) {
      int train_bins = static_cast<int>(cfg.train_end() / cfg.interval_minutes);
      IntervalSpec whole{cfg.interval_minutes, train_bins - 1, 0};
      auto series = inputs.log.bin_arrivals(cfg.target_hub, whole).as_reals();
      std::vector<double> grid;
      for (double v = 0.05; v < 1.0; v += 0.15) grid.push_back(v);
      int daily_period = 1440 / cfg.interval_minutes;
      auto fit = fit_holt_winters(series, daily_period,
                                  static_cast<std::size_t>(cfg.fit_end() / cfg.interval_minutes),
                                  grid);
      hw_params = fit.state;
    }
    return 0;
  });

  // --- walk-forward replay ---

  std::vector<OrderedForecast> val_ordered, test_ordered;
  std::vector<std::vector<double>> val_unordered, test_unordered;
  EnsembleModel ensemble_model;
  std::map<std::string, MethodSeries> forecasts;
  std::vector<std::vector<double>> val_actuals, test_actuals;

  stage("replay", [&] {
    for (long long t_o : val_grid)
      val_actuals.push_back(inputs.log.bin_arrivals(cfg.target_hub, tmpl.at(t_o)).as_reals());
    for (long long t_o : test_grid)
      test_actuals.push_back(inputs.log.bin_arrivals(cfg.target_hub, tmpl.at(t_o)).as_reals());

    if (needs_submodels) {
      DynamicUpdateOptions ordered_options;
      ordered_options.time_models.forest.tree_count = cfg.forest_trees;
      ordered_options.time_models.forest.min_leaf = cfg.forest_min_leaf;
      ordered_options.time_models.forest.seed = cfg.forest_seed;
      ordered_options.refit_every_minutes = cfg.rf_refit_minutes;

      std::vector<IntervalSpec> val_stream, test_stream;
      for (long long t_o : val_grid) val_stream.push_back(tmpl.at(t_o));
      for (long long t_o : test_grid) test_stream.push_back(tmpl.at(t_o));
      val_ordered =
          dynamic_update(inputs.log, inputs.net, cfg.target_hub, val_stream, ordered_options);
      test_ordered =
          dynamic_update(inputs.log, inputs.net, cfg.target_hub, test_stream, ordered_options);

      for (long long t_o : val_grid)
        val_unordered.push_back(
            forecast_unordered(unordered_model, inputs.log, cfg.target_hub, t_o));
      for (long long t_o : test_grid)
        test_unordered.push_back(
            forecast_unordered(unordered_model, inputs.log, cfg.target_hub, t_o));

      for (const auto& forecast : test_ordered)
        result.test_conservation.push_back(
            {forecast.spec.observation_time, forecast.total(),
             static_cast<long long>(inputs.log
                                        .snapshot(forecast.spec.observation_time, cfg.target_hub)
                                        .parcels.size())});
    }
    return 0;
  });

  auto ensemble_input_at = [&](std::size_t i, bool validation) {
    EnsembleInput input;
    input.u_hat = validation ? val_unordered[i] : test_unordered[i];
    const auto& ordered = validation ? val_ordered[i] : test_ordered[i];
    input.o_hat.assign(ordered.counts.begin(), ordered.counts.end());
    input.calendar = calendar_features(validation ? val_grid[i] : test_grid[i],
                                       cfg.interval_minutes, inputs.sim.start_day_of_week);
    return input;
  };

  if (wants(cfg, "ensemble_ann")) {
    stage("train", [&] {
      // Only holdout observation times whose whole horizon lies inside the
      // training window feed the combiner; later ones would train on
      // test-day actuals.
      std::vector<EnsembleInput> train_inputs;
      std::vector<std::vector<double>> train_targets;
      for (std::size_t i = 0; i < val_grid.size(); ++i) {
        if (val_grid[i] + static_cast<long long>(cfg.horizon_periods) * cfg.interval_minutes >
            cfg.train_end())
          continue;
        train_inputs.push_back(ensemble_input_at(i, true));
        train_targets.push_back(val_actuals[i]);
      }
      ensemble_model = train_ensemble(train_inputs, train_targets, cfg.ensemble_train);
      return 0;
    });
  }

  stage("replay", [&] {
    auto emit = [&](const std::string& method, bool validation,
                    const std::vector<std::vector<double>>& values) {
      auto& slot = forecasts[method];
      (validation ? slot.validation : slot.test) = values;
    };

    { // naive is always computed: it anchors every MASE value
      std::vector<std::vector<double>> val_rows, test_rows;
      for (long long t_o : val_grid)
        val_rows.push_back(naive_forecast(inputs.log, cfg.target_hub, tmpl.at(t_o)));
      for (long long t_o : test_grid)
        test_rows.push_back(naive_forecast(inputs.log, cfg.target_hub, tmpl.at(t_o)));
      emit("naive", true, val_rows);
      emit("naive", false, test_rows);
    }

    if (wants(cfg, "holt_winters")) {
      int total_bins = static_cast<int>(cfg.test_end() / cfg.interval_minutes);
      IntervalSpec whole{cfg.interval_minutes, total_bins - 1, 0};
      auto series = inputs.log.bin_arrivals(cfg.target_hub, whole).as_reals();
      int daily_period = 1440 / cfg.interval_minutes;
      std::size_t burn_in = 2 * static_cast<std::size_t>(daily_period);
      HoltWintersState state =
          hw_init({series.begin(), series.begin() + static_cast<long long>(burn_in)},
                  daily_period, hw_params.alpha, hw_params.beta, hw_params.gamma);
      std::vector<std::vector<double>> val_rows, test_rows;
      for (std::size_t i = burn_in; i < series.size(); ++i) {
        long long t_o = static_cast<long long>(i) * cfg.interval_minutes;
        bool in_val = t_o >= cfg.fit_end() && t_o < cfg.train_end();
        bool in_test = t_o >= cfg.train_end();
        if (in_val || in_test) {
          std::vector<double> row(static_cast<std::size_t>(cfg.horizon_periods));
          for (int h = 1; h <= cfg.horizon_periods; ++h)
            row[static_cast<std::size_t>(h - 1)] = hw_forecast(state, h);
          (in_val ? val_rows : test_rows).push_back(std::move(row));
        }
        state = hw_step(state, series[i]);
      }
      emit("holt_winters", true, val_rows);
      emit("holt_winters", false, test_rows);
    }

    if (wants(cfg, "ann_direct")) {
      std::vector<std::vector<double>> val_rows, test_rows;
      for (long long t_o : val_grid)
        val_rows.push_back(forecast_total_direct(direct_model, inputs.log, cfg.target_hub, t_o));
      for (long long t_o : test_grid)
        test_rows.push_back(forecast_total_direct(direct_model, inputs.log, cfg.target_hub, t_o));
      emit("ann_direct", true, val_rows);
      emit("ann_direct", false, test_rows);
    }

    if (wants(cfg, "ensemble_sum")) {
      std::vector<std::vector<double>> val_rows, test_rows;
      for (std::size_t i = 0; i < val_grid.size(); ++i) {
        auto input = ensemble_input_at(i, true);
        val_rows.push_back(combine_sum(input.u_hat, input.o_hat));
      }
      for (std::size_t i = 0; i < test_grid.size(); ++i) {
        auto input = ensemble_input_at(i, false);
        test_rows.push_back(combine_sum(input.u_hat, input.o_hat));
      }
      emit("ensemble_sum", true, val_rows);
      emit("ensemble_sum", false, test_rows);
    }

    if (wants(cfg, "ensemble_ann")) {
      std::vector<std::vector<double>> val_rows, test_rows;
      for (std::size_t i = 0; i < val_grid.size(); ++i)
        val_rows.push_back(combine_ann(ensemble_model, ensemble_input_at(i, true)));
      for (std::size_t i = 0; i < test_grid.size(); ++i)
        test_rows.push_back(combine_ann(ensemble_model, ensemble_input_at(i, false)));
      emit("ensemble_ann", true, val_rows);
      emit("ensemble_ann", false, test_rows);
    }
    return 0;
  });

  // --- scoring ---

  std::map<std::string, std::vector<ForecastRecord>> val_records, test_records;
  std::vector<SeriesPoint> series_points;
  stage("evaluate", [&] {
    auto collect = [&](const std::string& method, bool validation) {
      const auto& grid = validation ? val_grid : test_grid;
      const auto& actuals = validation ? val_actuals : test_actuals;
      const auto& rows = validation ? forecasts[method].validation : forecasts[method].test;
      long long phase_end = validation ? cfg.train_end() : cfg.test_end();
      std::vector<ForecastRecord> records;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        int horizons = pooled_horizons(cfg, grid[i], phase_end);
        for (int t = 0; t < horizons; ++t)
          records.push_back({method, grid[i], t, rows[i][static_cast<std::size_t>(t)],
                             actuals[i][static_cast<std::size_t>(t)]});
      }
      return records;
    };

    std::vector<std::string> scored = cfg.methods;
    if (!wants(cfg, "naive")) scored.push_back("naive"); // anchor, not reported
    for (const auto& method : scored) {
      val_records[method] = collect(method, true);
      test_records[method] = collect(method, false);
    }
    result.naive_test_mae = mae(test_records["naive"]);

    for (const auto& method : cfg.methods) {
      MethodReport report;
      report.method = method;
      report.mase_overall = mase(test_records[method], test_records["naive"]);
      report.mase_buckets = bucket_mase(test_records[method], test_records["naive"]);
      report.mae = mae(test_records[method]);
      report.bands = confidence_bands(val_records[method], cfg.horizon_periods);
      report.horizon_mase.resize(static_cast<std::size_t>(cfg.horizon_periods));
      for (int t = 0; t < cfg.horizon_periods; ++t) {
        auto pick = [&](const std::vector<ForecastRecord>& records) {
          std::vector<ForecastRecord> scoped;
          std::copy_if(records.begin(), records.end(), std::back_inserter(scoped),
                       [&](const ForecastRecord& r) { return r.horizon == t; });
          return scoped;
        };
        report.horizon_mase[static_cast<std::size_t>(t)] =
            mase(pick(test_records[method]), pick(test_records["naive"]));
      }
      result.reports.push_back(std::move(report));
    }

    // Series rows for the plot file at one fixed test observation time.
    auto series_it = std::find(test_grid.begin(), test_grid.end(), series_t_o);
    if (series_it != test_grid.end()) {
      std::size_t i = static_cast<std::size_t>(series_it - test_grid.begin());
      int horizons = pooled_horizons(cfg, series_t_o, cfg.test_end());
      for (int t = 0; t < horizons; ++t) {
        SeriesPoint point;
        point.horizon = t;
        point.actual = test_actuals[i][static_cast<std::size_t>(t)];
        for (const auto& method : cfg.methods)
          point.forecast[method] = forecasts[method].test[i][static_cast<std::size_t>(t)];
        series_points.push_back(std::move(point));
      }
    }
    return 0;
  });

  stage("write", [&] {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::pair<std::string, ForecastRecord>> phased;
    for (const auto& method : cfg.methods) {
      for (const auto& r : val_records[method]) phased.emplace_back("validation", r);
      for (const auto& r : test_records[method]) phased.emplace_back("test", r);
    }
    result.records_path = cfg.out_dir + "/forecast_records.tsv";
    write_records(result.records_path, phased, series_t_o);
    result.report_paths = write_report(cfg.out_dir, result.reports, series_points, series_t_o);
    result.log_path = inputs.log_path;

    std::vector<std::string> manifest{
        "network " + cfg.network_path + " " + file_hash_hex(cfg.network_path),
        "sim " + cfg.sim_path + " " + file_hash_hex(cfg.sim_path),
        "log " + inputs.log_path + " " + file_hash_hex(inputs.log_path),
        "target_hub " + cfg.target_hub,
        "interval_minutes " + std::to_string(cfg.interval_minutes),
        "horizon_periods " + std::to_string(cfg.horizon_periods),
        "train_days " + std::to_string(cfg.train_days),
        "test_days " + std::to_string(cfg.test_days),
        "holdout_days " + std::to_string(cfg.holdout_days),
        "sim_seed " + std::to_string(inputs.sim.seed),
        "ann_seed " + std::to_string(cfg.ann_train.seed),
        "ensemble_seed " + std::to_string(cfg.ensemble_train.seed),
        "forest_seed " + std::to_string(cfg.forest_seed)};
    std::string methods_line = "methods";
    for (const auto& m : cfg.methods) methods_line += " " + m;
    manifest.push_back(methods_line);
    result.manifest_path = cfg.out_dir + "/run_manifest.txt";
    write_manifest_file(result.manifest_path, manifest);
    return 0;
  });

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

DestShareOutput run_destshare(const RunConfig& cfg) {
  cfg.validate();
  PreparedInputs inputs = stage("load", [&] { return prepare_inputs(cfg); });
  stage("load", [&] {
    require_hub_arrivals(inputs, cfg.target_hub);
    return 0;
  });
  const IntervalSpec tmpl = cfg.spec_template();
  const long long horizon_minutes =
      static_cast<long long>(cfg.horizon_periods) * cfg.interval_minutes;

  // Destination set: final destinations of parcels that reach the target
  // hub inside the training window, in sorted order.
  std::vector<std::string> destinations = stage("plan", [&] {
    std::set<std::string> seen;
    for (const auto& r : inputs.log.records()) {
      auto arrived = r.arrival_at(cfg.target_hub);
      if (arrived && *arrived < cfg.train_end()) seen.insert(r.destination);
    }
    if (seen.empty())
      throw DataError("destshare: no parcels reach " + cfg.target_hub +
                      " inside the training window");
    return std::vector<std::string>(seen.begin(), seen.end());
  });

  auto observation_at = [&](long long t_o) {
    auto by_dest = inputs.log.unordered_by_destination(cfg.target_hub, tmpl.at(t_o));
    DestObservation obs(static_cast<std::size_t>(cfg.horizon_periods),
                        std::vector<long long>(destinations.size(), 0));
    for (std::size_t j = 0; j < destinations.size(); ++j) {
      auto it = by_dest.find(destinations[j]);
      if (it == by_dest.end()) continue;
      for (int t = 0; t < cfg.horizon_periods; ++t)
        obs[static_cast<std::size_t>(t)][j] = it->second.counts[static_cast<std::size_t>(t)];
    }
    return obs;
  };

  DestShareOutput out;
  stage("initialize", [&] {
    std::vector<DestObservation> history;
    for (long long t_o = 0; t_o + horizon_minutes <= cfg.train_end();
         t_o += cfg.interval_minutes)
      history.push_back(observation_at(t_o));
    out.initial = initialize_shares(history, destinations, cfg.horizon_periods,
                                    cfg.destshare_convention);
    return 0;
  });

  UnorderedModel model = stage("train", [&] {
    auto training = build_training_set(inputs.log, cfg.target_hub, tmpl, cfg.train_days);
    return fit_unordered(training.slice(0, cfg.fit_end()), tmpl, cfg.ann_train);
  });

  DestShareState state = out.initial;
  std::vector<std::vector<double>> last_allocation;
  long long last_t_o = 0;
  stage("update", [&] {
    for (long long t_o = cfg.train_end(); t_o < cfg.test_end(); t_o += cfg.interval_minutes) {
      auto u_hat = forecast_unordered(model, inputs.log, cfg.target_hub, t_o);
      last_allocation = allocate(u_hat, state); // allocate first, then learn from the actuals
      last_t_o = t_o;
      state = update_shares(state, observation_at(t_o), cfg.destshare_alpha);
    }
    out.final_state = state;
    return 0;
  });

  stage("write", [&] {
    std::filesystem::create_directories(cfg.out_dir);
    out.initial_path = cfg.out_dir + "/shares_initial.tsv";
    out.final_path = cfg.out_dir + "/shares_final.tsv";
    out.allocation_path = cfg.out_dir + "/allocation_last.tsv";
    write_share_matrix(out.initial_path, out.initial);
    write_share_matrix(out.final_path, out.final_state);
    std::ofstream alloc(out.allocation_path, std::ios::binary);
    if (!alloc) throw DataError("cannot write allocation file: " + out.allocation_path);
    alloc << "#hubcast-allocation v1\n";
    alloc << "# observation_time " << last_t_o << "\n";
    alloc << "period";
    for (const auto& d : destinations) alloc << '\t' << d;
    alloc << "\n";
    char buf[40];
    for (std::size_t t = 0; t < last_allocation.size(); ++t) {
      alloc << t;
      for (double v : last_allocation[t]) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        alloc << '\t' << buf;
      }
      alloc << "\n";
    }
    return 0;
  });
  return out;
}

ReportPaths render_report(const std::string& records_path, const std::string& out_dir) {
  RecordsFile file = read_records(records_path);
  std::vector<std::string> methods;
  std::map<std::string, std::vector<ForecastRecord>> val_records, test_records;
  for (const auto& [phase, record] : file.rows) {
    if (std::find(methods.begin(), methods.end(), record.method) == methods.end())
      methods.push_back(record.method);
    (phase == "validation" ? val_records : test_records)[record.method].push_back(record);
  }
  if (!test_records.count("naive"))
    throw DataError(records_path + ": records lack the naive method (MASE anchor)");

  int horizon_count = 0;
  for (const auto& r : test_records["naive"]) horizon_count = std::max(horizon_count, r.horizon + 1);

  std::vector<MethodReport> reports;
  for (const auto& method : methods) {
    MethodReport report;
    report.method = method;
    report.mase_overall = mase(test_records[method], test_records["naive"]);
    report.mase_buckets = bucket_mase(test_records[method], test_records["naive"]);
    report.mae = mae(test_records[method]);
    report.bands = confidence_bands(val_records[method], horizon_count);
    report.horizon_mase.resize(static_cast<std::size_t>(horizon_count));
    for (int t = 0; t < horizon_count; ++t) {
      auto pick = [&](const std::vector<ForecastRecord>& records) {
        std::vector<ForecastRecord> scoped;
        std::copy_if(records.begin(), records.end(), std::back_inserter(scoped),
                     [&](const ForecastRecord& r) { return r.horizon == t; });
        return scoped;
      };
      report.horizon_mase[static_cast<std::size_t>(t)] =
          mase(pick(test_records[method]), pick(test_records["naive"]));
    }
    reports.push_back(std::move(report));
  }

  long long series_t_o = file.series_observation_time;
  std::vector<SeriesPoint> series;
  for (const auto& r : test_records["naive"]) {
    if (r.observation_time != series_t_o) continue;
    SeriesPoint point;
    point.horizon = r.horizon;
    point.actual = r.actual;
    series.push_back(point);
  }
  std::sort(series.begin(), series.end(),
            [](const SeriesPoint& a, const SeriesPoint& b) { return a.horizon < b.horizon; });
  for (auto& point : series)
    for (const auto& method : methods)
      for (const auto& r : test_records[method])
        if (r.observation_time == series_t_o && r.horizon == point.horizon)
          point.forecast[method] = r.forecast;

  std::filesystem::create_directories(out_dir);
  return write_report(out_dir, reports, series, series_t_o);
}

} // namespace hubcast
