#include "hubcast/destshare.hpp"

#include "hubcast/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hubcast {

double DestShareState::at(int t, std::size_t j) const {
  return shares[static_cast<std::size_t>(t) * destinations.size() + j];
}

std::vector<double> DestShareState::row(int t) const {
  auto begin = shares.begin() + static_cast<std::size_t>(t) * destinations.size();
  return {begin, begin + destinations.size()};
}

void DestShareState::check_normalized() const {
  for (int t = 0; t < periods; ++t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < destinations.size(); ++j) {
      double v = at(t, j);
      if (v < 0.0 || v > 1.0)
        throw DataError("destination shares out of [0,1] at period " + std::to_string(t));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw DataError("destination shares at period " + std::to_string(t) +
                      " sum to " + std::to_string(sum));
  }
}

namespace {

void check_observation(const DestObservation& obs, int periods, std::size_t destinations) {
  if (static_cast<int>(obs.size()) != periods)
    throw ShapeError("destination observation has wrong period count");
  for (const auto& row : obs)
    if (row.size() != destinations)
      throw ShapeError("destination observation has wrong destination count");
}

} // namespace

DestShareState initialize_shares(const std::vector<DestObservation>& history,
                                 const std::vector<std::string>& destinations, int periods,
                                 ShareConvention convention) {
  if (destinations.empty()) throw ConfigError("destination shares: empty destination set");
  if (periods < 1) throw ConfigError("destination shares: periods must be >= 1");
  if (history.empty()) throw DataError("destination shares: empty initialization window");

  const std::size_t j_count = destinations.size();
  for (const auto& obs : history) check_observation(obs, periods, j_count);

  DestShareState state;
  state.destinations = destinations;
  state.periods = periods;
  state.convention = convention;
  state.shares.assign(static_cast<std::size_t>(periods) * j_count, 0.0);

  for (int t = 0; t < periods; ++t) {
    std::vector<double> dest_total(j_count, 0.0);
    double total = 0.0;
    for (const auto& obs : history)
      for (std::size_t j = 0; j < j_count; ++j) {
        dest_total[j] += static_cast<double>(obs[static_cast<std::size_t>(t)][j]);
        total += static_cast<double>(obs[static_cast<std::size_t>(t)][j]);
      }
    for (std::size_t j = 0; j < j_count; ++j)
      state.shares[static_cast<std::size_t>(t) * j_count + j] =
          total > 0.0 ? dest_total[j] / total : 1.0 / static_cast<double>(j_count);
  }
  state.check_normalized();
  return state;
}

DestShareState update_shares(const DestShareState& state, const DestObservation& observation,
                             double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw ConfigError("destination shares: alpha must lie in [0,1]");
  const std::size_t j_count = state.destinations.size();
  check_observation(observation, state.periods, j_count);

  DestShareState next = state;
  for (int t = 0; t < state.periods; ++t) {
    long long row_total = 0;
    for (std::size_t j = 0; j < j_count; ++j) row_total += observation[static_cast<std::size_t>(t)][j];
    if (row_total == 0) continue; // no arrivals this period: carry the shares over

    double norm = 0.0;
    for (std::size_t j = 0; j < j_count; ++j) {
      double rho = static_cast<double>(observation[static_cast<std::size_t>(t)][j]) /
                   static_cast<double>(row_total);
      double prior = state.at(t, j);
      double blended = state.convention == ShareConvention::weight_new
                           ? (1.0 - alpha) * prior + alpha * rho
                           : alpha * prior + (1.0 - alpha) * rho;
      next.shares[static_cast<std::size_t>(t) * j_count + j] = blended;
      norm += blended;
    }
    if (norm > 0.0)
      for (std::size_t j = 0; j < j_count; ++j)
        next.shares[static_cast<std::size_t>(t) * j_count + j] /= norm;
  }
  next.check_normalized();
  return next;
}

std::vector<std::vector<double>> allocate(const std::vector<double>& u_hat,
                                          const DestShareState& state) {
  if (static_cast<int>(u_hat.size()) != state.periods)
    throw ShapeError("allocate: forecast length does not match the share periods");
  state.check_normalized();
  std::vector<std::vector<double>> out(u_hat.size());
  for (int t = 0; t < state.periods; ++t) {
    out[static_cast<std::size_t>(t)].resize(state.destinations.size());
    for (std::size_t j = 0; j < state.destinations.size(); ++j)
      out[static_cast<std::size_t>(t)][j] = u_hat[static_cast<std::size_t>(t)] * state.at(t, j);
  }
  return out;
}

void write_share_matrix(const std::string& path, const DestShareState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write share matrix: " + path);
  out << "#hubcast-shares v1\n";
  out << "period";
  for (const auto& d : state.destinations) out << '\t' << d;
  out << "\n";
  char buf[40];
  for (int t = 0; t < state.periods; ++t) {
    out << t;
    for (std::size_t j = 0; j < state.destinations.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9f", state.at(t, j));
      out << '\t' << buf;
    }
    out << "\n";
  }
}

} // namespace hubcast
