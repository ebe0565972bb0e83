#include "hubcast/metrics.hpp"

#include "hubcast/config.hpp"
#include "hubcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hubcast {

double mae(const std::vector<ForecastRecord>& records) {
  if (records.empty()) throw DataError("mae: empty record scope");
  double sum = 0.0;
  for (const auto& r : records) sum += std::abs(r.actual - r.forecast);
  return sum / static_cast<double>(records.size());
}

namespace {

void check_alignment(const std::vector<ForecastRecord>& a, const std::vector<ForecastRecord>& b) {
  if (a.size() != b.size()) throw DataError("mase: record scopes differ in size");
  auto key = [](const ForecastRecord& r) { return std::make_pair(r.observation_time, r.horizon); };
  std::vector<std::pair<long long, int>> ka(a.size()), kb(b.size());
  std::transform(a.begin(), a.end(), ka.begin(), key);
  std::transform(b.begin(), b.end(), kb.begin(), key);
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  if (ka != kb) throw DataError("mase: record scopes cover different (t_o, horizon) pairs");
}

} // namespace

double mase(const std::vector<ForecastRecord>& records,
            const std::vector<ForecastRecord>& naive_records) {
  check_alignment(records, naive_records);
  double naive_mae = mae(naive_records);
  if (naive_mae == 0.0)
    throw DataError("mase: naive MAE is zero (degenerate series), metric undefined");
  return mae(records) / naive_mae;
}

std::array<double, 4> bucket_mase(const std::vector<ForecastRecord>& records,
                                  const std::vector<ForecastRecord>& naive_records) {
  std::array<double, 4> out{};
  for (std::size_t b = 0; b < kHorizonBuckets.size(); ++b) {
    auto in_bucket = [&](const ForecastRecord& r) {
      return r.horizon >= kHorizonBuckets[b].first && r.horizon <= kHorizonBuckets[b].second;
    };
    std::vector<ForecastRecord> scoped, naive_scoped;
    std::copy_if(records.begin(), records.end(), std::back_inserter(scoped), in_bucket);
    std::copy_if(naive_records.begin(), naive_records.end(), std::back_inserter(naive_scoped),
                 in_bucket);
    out[b] = mase(scoped, naive_scoped);
  }
  return out;
}

double BandEstimate::half_width() const { return std::max(std::abs(lo), std::abs(hi)); }

namespace {

// Linear-interpolation sample quantile (the common "type 7" definition).
double quantile(std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<BandEstimate> confidence_bands(const std::vector<ForecastRecord>& records,
                                           int horizon_count, double level) {
  if (level <= 0.0 || level >= 1.0)
    throw ConfigError("confidence_bands: level must lie strictly inside (0,1)");
  std::vector<std::vector<double>> residuals(static_cast<std::size_t>(horizon_count));
  for (const auto& r : records) {
    if (r.horizon < 0 || r.horizon >= horizon_count) continue;
    residuals[static_cast<std::size_t>(r.horizon)].push_back(r.actual - r.forecast);
  }
  std::vector<BandEstimate> bands(static_cast<std::size_t>(horizon_count));
  for (std::size_t h = 0; h < bands.size(); ++h) {
    auto& res = residuals[h];
    bands[h].sample_count = res.size();
    if (res.size() < 20) continue; // insufficient residuals: band omitted
    std::sort(res.begin(), res.end());
    bands[h].available = true;
    bands[h].lo = quantile(res, (1.0 - level) / 2.0);
    bands[h].hi = quantile(res, (1.0 + level) / 2.0);
  }
  return bands;
}

namespace {

constexpr const char* kReportHeader = "#hubcast-report v1";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

} // namespace

ReportPaths write_report(const std::string& out_dir, const std::vector<MethodReport>& reports,
                         const std::vector<SeriesPoint>& series,
                         long long series_observation_time) {
  std::filesystem::create_directories(out_dir);
  ReportPaths paths;
  paths.summary = out_dir + "/summary.tsv";
  paths.horizon_mase = out_dir + "/horizon_mase.tsv";
  paths.series = out_dir + "/series.tsv";

  {
    std::ofstream out(paths.summary, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + paths.summary);
    out << kReportHeader << "\n";
    out << "method\tmase\tmase_1_4h\tmase_5_8h\tmase_9_16h\tmase_17_24h\tmae\n";
    for (const auto& r : reports) {
      out << r.method << '\t' << fmt(r.mase_overall);
      for (double b : r.mase_buckets) out << '\t' << fmt(b);
      out << '\t' << fmt(r.mae) << "\n";
    }
  }

  {
    std::ofstream out(paths.horizon_mase, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + paths.horizon_mase);
    out << kReportHeader << "\n";
    out << "horizon";
    for (const auto& r : reports) out << '\t' << r.method;
    out << "\n";
    std::size_t horizons = 0;
    for (const auto& r : reports) horizons = std::max(horizons, r.horizon_mase.size());
    for (std::size_t h = 0; h < horizons; ++h) {
      out << h;
      for (const auto& r : reports)
        out << '\t' << (h < r.horizon_mase.size() ? fmt(r.horizon_mase[h]) : "");
      out << "\n";
    }
  }

  {
    std::ofstream out(paths.series, std::ios::binary);
    if (!out) throw DataError("cannot write report file: " + paths.series);
    out << kReportHeader << "\n";
    out << "# observation_time " << series_observation_time << "\n";
    out << "horizon\tactual";
    for (const auto& r : reports)
      out << '\t' << r.method << '\t' << r.method << "_lo\t" << r.method << "_hi";
    out << "\n";
    for (const auto& point : series) {
      out << point.horizon << '\t' << fmt(point.actual);
      for (const auto& r : reports) {
        auto it = point.forecast.find(r.method);
        double f = it == point.forecast.end() ? 0.0 : it->second;
        out << '\t' << fmt(f);
        const BandEstimate* band = nullptr;
        if (point.horizon >= 0 && static_cast<std::size_t>(point.horizon) < r.bands.size() &&
            r.bands[static_cast<std::size_t>(point.horizon)].available)
          band = &r.bands[static_cast<std::size_t>(point.horizon)];
        out << '\t' << (band ? fmt(f + band->lo) : "") << '\t' << (band ? fmt(f + band->hi) : "");
      }
      out << "\n";
    }
  }
  return paths;
}

void write_records(const std::string& path,
                   const std::vector<std::pair<std::string, ForecastRecord>>& phased_records,
                   long long series_observation_time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write records file: " + path);
  out << "#hubcast-records v1\n";
  out << "# series_observation " << series_observation_time << "\n";
  out << "phase\tmethod\tobservation_time\thorizon\tforecast\tactual\n";
  for (const auto& [phase, r] : phased_records)
    out << phase << '\t' << r.method << '\t' << r.observation_time << '\t' << r.horizon << '\t'
        << fmt(r.forecast) << '\t' << fmt(r.actual) << "\n";
}

RecordsFile read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open records file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#hubcast-records v1")
    throw DataError(path + ": unsupported records header");
  RecordsFile file;
  if (!std::getline(in, line)) throw DataError(path + ": truncated records file");
  if (line.rfind("# series_observation ", 0) == 0) {
    file.series_observation_time = parse_int(line.substr(21), "series_observation");
    if (!std::getline(in, line)) throw DataError(path + ": missing column header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 6) throw DataError(path + ": malformed records row: " + line);
    ForecastRecord r;
    r.method = cols[1];
    r.observation_time = parse_int(cols[2], "records observation_time");
    r.horizon = static_cast<int>(parse_int(cols[3], "records horizon"));
    r.forecast = parse_double(cols[4], "records forecast");
    r.actual = parse_double(cols[5], "records actual");
    file.rows.emplace_back(cols[0], std::move(r));
  }
  return file;
}

} // namespace hubcast
