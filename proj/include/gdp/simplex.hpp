#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gdp/rng.hpp"

namespace gdp {

// One proposed coordinate move on a normalized log-weight vector. The
// proposal for l == coord is li_new and for every other l it is
// cur[l] + shift. Targets receive the move instead of the finished vector so
// they can read each coordinate's exact displacement: dcoord and shift are
// computed from the logit increment directly, which keeps the differences
// exact even where cur[l] is so large in magnitude that cur[l] + shift
// rounds back to cur[l].
struct SimplexMove {
  const std::vector<double>& cur;  // current normalized log weights
  std::size_t coord;               // index being moved
  double li_new;                   // proposed log weight of coord
  double shift;                    // additive log change of every other entry
  double dcoord;                   // li_new - cur[coord], computed exactly

  double at(std::size_t l) const {
    return l == coord ? li_new : cur[l] + shift;
  }
  double delta(std::size_t l) const { return l == coord ? dcoord : shift; }
};

// Metropolis-Hastings kernel on the probability simplex. States are
// normalized log-weight vectors (logsumexp zero): one coordinate per step is
// moved by a Gaussian increment on the logit scale and the remaining
// coordinates are rescaled proportionally, with the proposal map, the
// complement log(1-x_i), and the Jacobian x_i (1-x_i)^(L-1) of the (logit
// coordinate, relative rest) parameterization all evaluated in log space.
// Coordinates may therefore sit arbitrarily far below the smallest positive
// double, which near-degenerate conditionals require; no clamping ever
// touches the state.
//
// The target is consumed as a density ratio of the move, never as two
// absolute log densities: near-degenerate conditionals reach magnitudes at
// which an O(1) acceptance ratio is far beneath the rounding error of the
// absolute values, so the cancellation has to happen inside the target.
//
// Coordinates are visited in a deterministic cycle. Proposals where the
// ratio is non-finite are rejected rather than thrown.
class SimplexKernel {
 public:
  // Log density ratio of a move: log p(move applied) - log p(move.cur).
  using LogTargetRatio = std::function<double(const SimplexMove&)>;

  SimplexKernel(int dim, double init_scale = 0.5, double target_accept = 0.3);

  // One MH step; advances the coordinate cycle. Returns the (possibly
  // unchanged) log-weight state and whether the proposal was accepted.
  std::pair<std::vector<double>, bool> propose_and_step(
      const std::vector<double>& current, const LogTargetRatio& ratio,
      Rng& rng);

  // One full cycle over all coordinates, updating the log weights lx in
  // place (renormalizing first). Returns the number of accepted moves.
  int sweep(std::vector<double>& lx, const LogTargetRatio& ratio, Rng& rng);

  // Robbins-Monro scale update from per-coordinate window acceptance rates;
  // gain t^-0.6 with t counting adapt() calls. Throws AdaptAfterFreeze once
  // frozen.
  void adapt(const std::vector<double>& window_rates);

  // Convenience: adapt from the internal window counters, then clear them.
  void adapt_from_window();

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  int dim() const { return dim_; }
  double target_accept() const { return target_; }
  const std::vector<double>& log_scales() const { return log_scale_; }

  std::vector<double> window_rates() const;
  void reset_window();
  // Lifetime acceptance rate over all attempted steps.
  double overall_acceptance() const;

 private:
  bool step_impl(std::vector<double>& lx, const LogTargetRatio& ratio,
                 Rng& rng);

  int dim_;
  double target_;
  bool frozen_ = false;
  long adapt_calls_ = 0;
  int next_coord_ = 0;
  std::vector<double> log_scale_;
  std::vector<long> win_accept_, win_attempt_, tot_accept_, tot_attempt_;
};

}  // namespace gdp
