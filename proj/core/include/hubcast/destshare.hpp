#pragma once

#include <string>
#include <vector>

namespace hubcast {

/// Which side of the smoothing blend the new observation weights. The
/// updating-loop convention gives alpha to the new observation; the
/// closed-form recursion written elsewhere assigns it to the prior state.
/// Both are selectable; the updating-loop form is the default.
enum class ShareConvention { weight_new, weight_old };

/// Counts of unordered arrivals per period and destination for one
/// observation time: observation[t][j].
using DestObservation = std::vector<std::vector<long long>>;

/**
 * Destination-share estimates d[t][j]: the fraction of period-t unordered
 * volume bound for destination j. Every row sums to 1 (within 1e-9) and
 * all entries lie in [0,1] after each operation.
 */
struct DestShareState {
  std::vector<std::string> destinations; // sorted hub ids, fixes column order
  int periods = 0;
  std::vector<double> shares; // periods x destinations, row-major
  ShareConvention convention = ShareConvention::weight_new;

  double at(int t, std::size_t j) const;
  std::vector<double> row(int t) const;
  void check_normalized() const;
};

/**
 * Aggregates the initialization observations and sets d[t][j] to the
 * destination-j fraction of the period-t total. Periods with no arrivals
 * anywhere in the window fall back to the uniform share.
 */
DestShareState initialize_shares(const std::vector<DestObservation>& history,
                                 const std::vector<std::string>& destinations, int periods,
                                 ShareConvention convention = ShareConvention::weight_new);

/**
 * Blends one new observation into the state with smoothing weight alpha
 * and renormalizes each row. Rows whose observation total is zero carry
 * over unchanged. alpha = 0 leaves the state untouched; alpha = 1 adopts
 * the observation's distribution outright.
 */
DestShareState update_shares(const DestShareState& state, const DestObservation& observation,
                             double alpha);

/// Splits a volume forecast across destinations: result[t][j] =
/// u_hat[t] * d[t][j]; row sums reconstruct u_hat exactly up to float
/// tolerance.
std::vector<std::vector<double>> allocate(const std::vector<double>& u_hat,
                                          const DestShareState& state);

/// Tab-separated share matrix (rows = periods, columns = destinations).
void write_share_matrix(const std::string& path, const DestShareState& state);

} // namespace hubcast
