#include "gdp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdp/error.hpp"
#include "gdp/mathutil.hpp"

namespace gdp {

namespace {
// Keeps adapted scales inside a sane band.
constexpr double kMinLogScale = -18.0;
constexpr double kMaxLogScale = 4.0;

// logsumexp over every entry except index i: log(1 - x_i) for a normalized
// log-weight vector, exact even when x_i is within rounding of one.
double complement_log(const std::vector<double>& lx, std::size_t i) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < lx.size(); ++j)
    if (j != i && lx[j] > m) m = lx[j];
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j)
    if (j != i) s += std::exp(lx[j] - m);
  return m + std::log(s);
}
}  // namespace

SimplexKernel::SimplexKernel(int dim, double init_scale, double target_accept)
    : dim_(dim), target_(target_accept) {
  if (dim < 2) fail(Errc::ConfigMismatch, "simplex kernel needs dim >= 2");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale))
    fail(Errc::ConfigMismatch, "initial step scale must be positive");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    fail(Errc::ConfigMismatch, "target acceptance must lie in (0,1)");
  log_scale_.assign(static_cast<std::size_t>(dim), std::log(init_scale));
  win_accept_.assign(static_cast<std::size_t>(dim), 0);
  win_attempt_.assign(static_cast<std::size_t>(dim), 0);
  tot_accept_.assign(static_cast<std::size_t>(dim), 0);
  tot_attempt_.assign(static_cast<std::size_t>(dim), 0);
}

// One coordinate move; lx is updated only on acceptance. The logit of
// coordinate i is lx[i] - log(1-x_i) with the complement taken over the
// other coordinates, and the rescale of the rest is a shared additive shift
// of their logs, so the move is exact at any depth of degeneracy. The move
// deltas handed to the target and the Jacobian term are taken from the logit
// increment itself: for t and t_new both far negative the coordinate's log
// change is t_new - t exactly, where computing li_new - lx[i] would lose it.
bool SimplexKernel::step_impl(std::vector<double>& lx,
                              const LogTargetRatio& ratio, Rng& rng) {
  std::size_t i = static_cast<std::size_t>(next_coord_);
  next_coord_ = (next_coord_ + 1) % dim_;
  ++win_attempt_[i];
  ++tot_attempt_[i];

  double mi = complement_log(lx, i);
  double t = lx[i] - mi;
  if (!std::isfinite(t)) return false;
  double t_new = t + std::exp(log_scale_[i]) * rng.normal();
  double li_new = -log1pexp(-t_new);
  double li_cur = -log1pexp(-t);
  double shift = log1pexp(t) - log1pexp(t_new);
  double dcoord =
      (t <= -37.0 && t_new <= -37.0) ? t_new - t : li_new - li_cur;

  SimplexMove move{lx, i, li_new, shift, dcoord};
  double nm1 = static_cast<double>(dim_ - 1);
  double log_ratio = ratio(move) + dcoord + nm1 * shift;
  if (!(log_ratio > -std::numeric_limits<double>::infinity())) return false;

  if (std::log(rng.uniform()) < log_ratio) {
    ++win_accept_[i];
    ++tot_accept_[i];
    for (std::size_t j = 0; j < lx.size(); ++j)
      lx[j] = (j == i) ? li_new : lx[j] + shift;
    return true;
  }
  return false;
}

std::pair<std::vector<double>, bool> SimplexKernel::propose_and_step(
    const std::vector<double>& current, const LogTargetRatio& ratio,
    Rng& rng) {
  std::vector<double> lx = current;
  bool accepted = step_impl(lx, ratio, rng);
  return {std::move(lx), accepted};
}

int SimplexKernel::sweep(std::vector<double>& lx, const LogTargetRatio& ratio,
                         Rng& rng) {
  // Each accepted move preserves logsumexp(lx) = 0 up to rounding; the
  // renormalization here stops that rounding from accumulating across sweeps.
  double z = logsumexp(lx);
  if (std::isfinite(z))
    for (double& v : lx) v -= z;
  int accepted = 0;
  for (int c = 0; c < dim_; ++c)
    if (step_impl(lx, ratio, rng)) ++accepted;
  return accepted;
}

void SimplexKernel::adapt(const std::vector<double>& window_rates) {
  if (frozen_) fail(Errc::AdaptAfterFreeze, "kernel scales are frozen");
  if (window_rates.size() != static_cast<std::size_t>(dim_))
    fail(Errc::LengthMismatch, "window rate vector has wrong dimension");
  ++adapt_calls_;
  double gain = std::pow(static_cast<double>(adapt_calls_), -0.6);
  for (std::size_t c = 0; c < window_rates.size(); ++c)
    log_scale_[c] = std::clamp(log_scale_[c] + gain * (window_rates[c] - target_),
                               kMinLogScale, kMaxLogScale);
}

void SimplexKernel::adapt_from_window() {
  adapt(window_rates());
  reset_window();
}

std::vector<double> SimplexKernel::window_rates() const {
  std::vector<double> rates(static_cast<std::size_t>(dim_), target_);
  for (std::size_t c = 0; c < rates.size(); ++c)
    if (win_attempt_[c] > 0)
      rates[c] = static_cast<double>(win_accept_[c]) /
                 static_cast<double>(win_attempt_[c]);
  return rates;
}

void SimplexKernel::reset_window() {
  std::fill(win_accept_.begin(), win_accept_.end(), 0);
  std::fill(win_attempt_.begin(), win_attempt_.end(), 0);
}

double SimplexKernel::overall_acceptance() const {
  long acc = 0, att = 0;
  for (std::size_t c = 0; c < tot_accept_.size(); ++c) {
    acc += tot_accept_[c];
    att += tot_attempt_[c];
  }
  return att ? static_cast<double>(acc) / static_cast<double>(att) : 0.0;
}

}  // namespace gdp
