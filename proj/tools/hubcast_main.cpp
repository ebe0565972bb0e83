// Command-line front end: simulate | run | destshare | report.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 training error.

#include "hubcast/errors.hpp"
#include "hubcast/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr const char* kFormatNotes =
    "File formats:\n"
    "  Event log: `#hubcast-eventlog v1` header, then one parcel per line:\n"
    "    parcel_id,order_time,origin,destination,path(|-separated),\n"
    "    events([loc,arr,dep];-separated, `-` = still there / delivered)\n"
    "  Report files (out_dir): summary.tsv, horizon_mase.tsv, series.tsv,\n"
    "    forecast_records.tsv; all tab-separated with a version header.\n"
    "  Network/sim/run configs: `key = value` lines, `#` comments; see\n"
    "    configs/ for commented examples.\n"
    "Environment: HUBCAST_OUT_DIR overrides the run output directory.";

int run_cli(int argc, char** argv) {
  CLI::App app{"hubcast: parcel arrival forecasting toolkit"};
  app.footer(kFormatNotes);
  app.require_subcommand(1);

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic parcel event log");
  std::string sim_network, sim_config, sim_out = "out";
  long long sim_seed = -1;
  sim_cmd->add_option("--network", sim_network, "Network spec file")->required();
  sim_cmd->add_option("--sim", sim_config, "Simulation config file")->required();
  sim_cmd->add_option("--out", sim_out, "Output directory");
  sim_cmd->add_option("--seed", sim_seed, "Override the config seed");

  auto* run_cmd = app.add_subcommand("run", "Train, walk-forward forecast, evaluate, report");
  std::string run_config, run_out;
  bool dry_run = false;
  run_cmd->add_option("--config", run_config, "Run config file")->required();
  run_cmd->add_option("--out", run_out, "Override the output directory");
  run_cmd->add_flag("--dry-run", dry_run, "Print the resolved plan and write nothing");

  auto* dest_cmd = app.add_subcommand("destshare", "Destination-share forecast study");
  std::string dest_config, dest_out;
  double dest_alpha = -1.0;
  std::string dest_convention;
  dest_cmd->add_option("--config", dest_config, "Run config file")->required();
  dest_cmd->add_option("--out", dest_out, "Override the output directory");
  dest_cmd->add_option("--alpha", dest_alpha, "Override the smoothing parameter");
  dest_cmd->add_option("--convention", dest_convention,
                       "Smoothing convention: algorithm|equation");

  auto* report_cmd = app.add_subcommand("report", "Re-render report files from saved records");
  std::string report_records, report_out = "out";
  report_cmd->add_option("--records", report_records, "forecast_records.tsv path")->required();
  report_cmd->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    app.exit(e);
    return 2;
  }

  if (sim_cmd->parsed()) {
    auto out = hubcast::cmd_simulate(sim_network, sim_config, sim_out, sim_seed);
    std::cout << "wrote " << out.log_path << " (" << out.parcel_count << " parcels)\n";
    std::cout << "manifest: " << out.manifest_path << "\n";
    return 0;
  }

  if (run_cmd->parsed()) {
    hubcast::RunConfig cfg = hubcast::RunConfig::load(run_config);
    if (!run_out.empty()) cfg.out_dir = run_out;
    cfg.dry_run = dry_run;
    auto result = hubcast::run_pipeline(cfg);
    if (dry_run) return 0;
    std::cout << "report: " << result.report_paths.summary << "\n";
    for (const auto& r : result.reports)
      std::printf("  %-14s MASE %.4f  MAE %.4f\n", r.method.c_str(), r.mase_overall, r.mae);
    std::printf("elapsed: %.1f s\n", result.elapsed_seconds);
    return 0;
  }

  if (dest_cmd->parsed()) {
    hubcast::RunConfig cfg = hubcast::RunConfig::load(dest_config);
    if (!dest_out.empty()) cfg.out_dir = dest_out;
    if (dest_alpha >= 0.0) cfg.destshare_alpha = dest_alpha;
    if (!dest_convention.empty()) {
      if (dest_convention == "algorithm")
        cfg.destshare_convention = hubcast::ShareConvention::weight_new;
      else if (dest_convention == "equation")
        cfg.destshare_convention = hubcast::ShareConvention::weight_old;
      else
        throw hubcast::ConfigError("--convention must be `algorithm` or `equation`");
    }
    auto out = hubcast::run_destshare(cfg);
    std::cout << "shares: " << out.initial_path << ", " << out.final_path << "\n";
    std::cout << "allocation: " << out.allocation_path << "\n";
    return 0;
  }

  if (report_cmd->parsed()) {
    auto paths = hubcast::render_report(report_records, report_out);
    std::cout << "report: " << paths.summary << "\n";
    return 0;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const hubcast::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const hubcast::TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 4;
  } catch (const hubcast::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const hubcast::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
