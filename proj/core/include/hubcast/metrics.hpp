#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace hubcast {

/// One scored forecast: method, observation time, horizon index, the
/// forecast value and the later-observed actual.
struct ForecastRecord {
  std::string method;
  long long observation_time = 0;
  int horizon = 0;
  double forecast = 0.0;
  double actual = 0.0;
};

/// Horizon buckets used in the per-horizon breakdown: 1-4h, 5-8h, 9-16h
/// and 17-24h ahead at 15-minute periods.
constexpr std::array<std::pair<int, int>, 4> kHorizonBuckets{
    {{0, 15}, {16, 31}, {32, 63}, {64, 95}}};

double mae(const std::vector<ForecastRecord>& records);

/// MAE ratio against the naive records over the identical (t_o, horizon)
/// scope. Throws DataError on misaligned scopes or a zero naive MAE.
double mase(const std::vector<ForecastRecord>& records,
            const std::vector<ForecastRecord>& naive_records);

std::array<double, 4> bucket_mase(const std::vector<ForecastRecord>& records,
                                  const std::vector<ForecastRecord>& naive_records);

/// Empirical residual band around the point forecast at one horizon.
struct BandEstimate {
  bool available = false;
  double lo = 0.0; // residual quantile offsets, added to the forecast
  double hi = 0.0;
  std::size_t sample_count = 0;

  double half_width() const;
};

/**
 * Per-horizon empirical residual quantiles at (1 +- level)/2. Horizons
 * with fewer than 20 residuals are marked unavailable (reported as a
 * warning by callers, not an error).
 */
std::vector<BandEstimate> confidence_bands(const std::vector<ForecastRecord>& records,
                                           int horizon_count, double level = 0.95);

/// Everything the report renders for one method.
struct MethodReport {
  std::string method;
  double mase_overall = 0.0;
  std::array<double, 4> mase_buckets{};
  double mae = 0.0;
  std::vector<double> horizon_mase;  // per horizon index
  std::vector<BandEstimate> bands;   // per horizon index
};

/// Forecast-vs-actual rows for one observation time (plot fodder).
struct SeriesPoint {
  int horizon = 0;
  double actual = 0.0;
  std::map<std::string, double> forecast;
};

struct ReportPaths {
  std::string summary;
  std::string horizon_mase;
  std::string series;
};

/**
 * Writes the three report files under out_dir with deterministic
 * formatting: summary.tsv (one row per method), horizon_mase.tsv
 * (horizon x method matrix) and series.tsv (forecast vs actual with band
 * columns for one observation time).
 */
ReportPaths write_report(const std::string& out_dir, const std::vector<MethodReport>& reports,
                         const std::vector<SeriesPoint>& series, long long series_observation_time);

/// Tab-separated persistence of scored records, replayable by the report
/// subcommand. `phase` distinguishes validation rows (band source) from
/// test rows (metric source).
struct RecordsFile {
  std::vector<std::pair<std::string, ForecastRecord>> rows;
  long long series_observation_time = -1;
};

void write_records(const std::string& path,
                   const std::vector<std::pair<std::string, ForecastRecord>>& phased_records,
                   long long series_observation_time);
RecordsFile read_records(const std::string& path);

} // namespace hubcast
