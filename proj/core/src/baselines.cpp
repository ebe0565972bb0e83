#include "hubcast/baselines.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hubcast {

void HoltWintersState::validate() const {
  if (period < 1) throw ConfigError("holt-winters: period must be >= 1");
  if (static_cast<int>(seasonal.size()) != period)
    throw ShapeError("holt-winters: seasonal buffer length must equal the period");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(alpha) || !in_unit(beta) || !in_unit(gamma))
    throw ConfigError("holt-winters: smoothing parameters must lie in [0,1]");
}

HoltWintersState hw_init(const std::vector<double>& history, int period, double alpha, double beta,
                         double gamma) {
  if (period < 1) throw ConfigError("holt-winters: period must be >= 1");
  if (history.size() < 2 * static_cast<std::size_t>(period))
    throw DataError("holt-winters init: need at least two full seasons of history");

  const std::size_t m = static_cast<std::size_t>(period);
  double mean1 = 0.0, mean2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean1 += history[i];
    mean2 += history[m + i];
  }
  mean1 /= static_cast<double>(m);
  mean2 /= static_cast<double>(m);

  HoltWintersState state;
  state.period = period;
  state.alpha = alpha;
  state.beta = beta;
  state.gamma = gamma;
  state.level = mean1;
  state.trend = (mean2 - mean1) / static_cast<double>(m);
  state.seasonal.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    state.seasonal[k] = 0.5 * ((history[k] - mean1) + (history[m + k] - mean2));
  state.validate();
  return state;
}

HoltWintersState hw_step(const HoltWintersState& state, double y) {
  state.validate();
  HoltWintersState next = state;
  double season_old = state.seasonal.front(); // s_{t-m}
  next.level = state.alpha * (y - season_old) + (1.0 - state.alpha) * (state.level + state.trend);
  next.trend = state.beta * (next.level - state.level) + (1.0 - state.beta) * state.trend;
  double season_new = state.gamma * (y - next.level) + (1.0 - state.gamma) * season_old;
  next.seasonal.erase(next.seasonal.begin());
  next.seasonal.push_back(season_new);
  return next;
}

double hw_forecast(const HoltWintersState& state, int h) {
  state.validate();
  if (h < 1) throw ConfigError("holt-winters forecast: h must be >= 1");
  double season = state.seasonal[static_cast<std::size_t>((h - 1) % state.period)];
  double value = state.level + static_cast<double>(h) * state.trend + season;
  return std::max(0.0, value);
}

HoltWintersFit fit_holt_winters(const std::vector<double>& series, int period,
                                std::size_t eval_from, const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("holt-winters fit: empty parameter grid");
  if (series.size() < 2 * static_cast<std::size_t>(period) + 1)
    throw DataError("holt-winters fit: series too short for the period");
  if (eval_from >= series.size())
    throw DataError("holt-winters fit: evaluation window is empty");
  eval_from = std::max(eval_from, 2 * static_cast<std::size_t>(period));

  HoltWintersFit best;
  bool have_best = false;
  for (double a : grid)
    for (double b : grid)
      for (double g : grid) {
        HoltWintersState state =
            hw_init({series.begin(), series.begin() + 2 * static_cast<std::size_t>(period)},
                    period, a, b, g);
        double abs_err = 0.0;
        std::size_t evals = 0;
        for (std::size_t i = 2 * static_cast<std::size_t>(period); i < series.size(); ++i) {
          if (i >= eval_from) {
            abs_err += std::abs(series[i] - hw_forecast(state, 1));
            ++evals;
          }
          state = hw_step(state, series[i]);
        }
        double mae = evals ? abs_err / static_cast<double>(evals) : 0.0;
        if (!have_best || mae < best.one_step_mae) {
          have_best = true;
          best.state = std::move(state);
          best.one_step_mae = mae;
        }
      }
  return best;
}

std::vector<double> naive_forecast(const EventLog& log, const std::string& hub,
                                   const IntervalSpec& spec) {
  spec.validate();
  if (spec.observation_time < 1440)
    throw DataError("naive forecast: cold start, needs one full day of history");
  return log.bin_arrivals(hub, spec.at(spec.observation_time - 1440)).as_reals();
}

} // namespace hubcast
