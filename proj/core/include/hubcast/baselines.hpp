#pragma once

#include "hubcast/datastore.hpp"

#include <cstddef>
#include <vector>

namespace hubcast {

/**
 * Additive triple-exponential-smoothing state.
 *
 * seasonal[0] is the component m steps back (the one the next update
 * consumes); each step rotates the buffer.
 */
struct HoltWintersState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonal;
  double alpha = 0.5;
  double beta = 0.1;
  double gamma = 0.1;
  int period = 1; // m

  void validate() const;
};

/**
 * Initializes from at least two full seasons: the level is the first
 * season's mean, the trend the per-step drift between the first two season
 * means, and each seasonal phase the average de-meaned value over both
 * seasons.
 */
HoltWintersState hw_init(const std::vector<double>& history, int period, double alpha, double beta,
                         double gamma);

/// One observation update: level, then trend, then seasonal; the seasonal
/// buffer rotates by one step.
HoltWintersState hw_step(const HoltWintersState& state, double y);

/// h-step-ahead forecast: level + h*trend + seasonal at the matching
/// phase, clamped at zero for reporting.
double hw_forecast(const HoltWintersState& state, int h);

/// Grid-search choice of the smoothing parameters: replays the series
/// with every candidate triple and keeps the one minimizing one-step MAE
/// over [eval_from, series end). Returns the state advanced through the
/// whole series with the winning parameters.
struct HoltWintersFit {
  HoltWintersState state;
  double one_step_mae = 0.0;
};
HoltWintersFit fit_holt_winters(const std::vector<double>& series, int period,
                                std::size_t eval_from, const std::vector<double>& grid);

/// Previous-day forecast: the actual arrivals in the same wall-clock
/// windows one day earlier. The MASE anchor.
std::vector<double> naive_forecast(const EventLog& log, const std::string& hub,
                                   const IntervalSpec& spec);

} // namespace hubcast
