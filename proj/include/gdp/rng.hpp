#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "gdp/error.hpp"

namespace gdp {

// Seeded generator plus the handful of draws the samplers need. One Rng per
// chain / replicate; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(gen_);
  }

  // Shape/rate parameterization. Draws are clamped away from exact zero so
  // that downstream normalizations and logs stay finite even for tiny shapes.
  double gamma(double shape, double rate = 1.0) {
    if (!(shape > 0.0) || !(rate > 0.0))
      fail(Errc::ZeroConcentration, "gamma draw needs shape > 0 and rate > 0");
    double g = std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
    return std::max(g, 1e-300);
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  // Log of a Gamma(shape, 1) draw. Shapes below the boost threshold go
  // through X = U * V^(1/shape) with U ~ Gamma(shape + 1), so the returned
  // log stays faithful far below the smallest positive double. The floor
  // only engages where the true log itself falls outside double range, so
  // every representable draw is exact.
  double gamma_log(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
      fail(Errc::ZeroConcentration, "gamma_log draw needs finite shape > 0");
    if (shape >= 0.25) {
      double g = std::gamma_distribution<double>(shape, 1.0)(gen_);
      while (!(g > 0.0)) g = std::gamma_distribution<double>(shape, 1.0)(gen_);
      return std::log(g);
    }
    double u = std::gamma_distribution<double>(shape + 1.0, 1.0)(gen_);
    while (!(u > 0.0)) u = std::gamma_distribution<double>(shape + 1.0, 1.0)(gen_);
    double v = uniform();
    while (!(v > 0.0)) v = uniform();
    double log_x = std::log(u) + std::log(v) / shape;
    return std::max(log_x, kLogDrawFloor);
  }

  // gamma_log with the shape itself supplied in log space. Below the boost
  // threshold the exponent 1/shape is applied as a log-space subtraction, so
  // shapes far beneath the smallest positive double still produce faithful
  // log draws instead of overflowing to -inf.
  double gamma_log_from_log_shape(double log_shape) {
    if (!std::isfinite(log_shape))
      fail(Errc::ZeroConcentration,
           "gamma_log_from_log_shape needs a finite log shape");
    if (log_shape >= std::log(0.25)) return gamma_log(std::exp(log_shape));
    double u = std::gamma_distribution<double>(std::exp(log_shape) + 1.0, 1.0)(gen_);
    while (!(u > 0.0))
      u = std::gamma_distribution<double>(std::exp(log_shape) + 1.0, 1.0)(gen_);
    double v = uniform();
    while (!(v > 0.0)) v = uniform();
    double mag = std::log(-std::log(v)) - log_shape;
    double drop = (mag > 708.0) ? -std::numeric_limits<double>::infinity()
                                : -std::exp(mag);
    return std::max(std::log(u) + drop, kLogDrawFloor);
  }

  // Normalized log weights of a Dirichlet draw. Unlike dirichlet() there is
  // no parameter floor and no output clamp: arbitrarily small positive
  // concentrations yield faithful log weights, which keeps conditional draws
  // exact in near-degenerate states.
  std::vector<double> dirichlet_log(const std::vector<double>& conc) {
    std::vector<double> y(conc.size());
    for (std::size_t i = 0; i < conc.size(); ++i) {
      if (!(conc[i] > 0.0) || !std::isfinite(conc[i]))
        fail(Errc::ZeroConcentration,
             "dirichlet_log needs finite concentrations > 0");
      y[i] = gamma_log(conc[i]);
    }
    normalize_log(y);
    return y;
  }

  // dirichlet_log with the concentrations supplied in log space, for
  // conditionals whose parameters are products of weights that may themselves
  // be degenerate.
  std::vector<double> dirichlet_from_log_conc(
      const std::vector<double>& log_conc) {
    std::vector<double> y(log_conc.size());
    for (std::size_t i = 0; i < log_conc.size(); ++i)
      y[i] = gamma_log_from_log_shape(log_conc[i]);
    normalize_log(y);
    return y;
  }

  // Just inside the most negative double, so the floor never swallows a log
  // weight that conditional densities could still distinguish. Terms of the
  // form conc * log_weight carry order-one information whenever
  // |log_weight| <= 1/conc, so any floor shallower than the double range
  // would zero them out and tilt the targets that read these draws.
  static constexpr double kLogDrawFloor = -1.0e308;

  double chisq(double dof) { return gamma(0.5 * dof, 0.5); }

  // Parameters are floored at 1e-10 before the gamma draws; exact zeros in the
  // result are clamped to 1e-300 so the simplex stays strictly positive.
  std::vector<double> dirichlet(const std::vector<double>& conc) {
    std::vector<double> w(conc.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < conc.size(); ++i) {
      if (!(conc[i] >= 0.0))
        fail(Errc::ZeroConcentration, "negative Dirichlet parameter");
      w[i] = gamma(std::max(conc[i], 1e-10));
      sum += w[i];
    }
    for (double& x : w) x = std::max(x / sum, 1e-300);
    return w;
  }

  // Index draw from unnormalized nonnegative weights.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0) || !std::isfinite(total))
      fail(Errc::AllZeroMass, "categorical draw with no finite positive mass");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // Index draw from log weights, stabilized by the max.
  int categorical_log(const std::vector<double>& logw) {
    double m = -std::numeric_limits<double>::infinity();
    for (double lw : logw)
      if (lw > m) m = lw;
    if (!std::isfinite(m))
      fail(Errc::AllZeroMass, "all log-weights are -inf");
    std::vector<double> w(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i) w[i] = std::exp(logw[i] - m);
    return categorical(w);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  // Shifts log weights so their exponentials sum to one.
  static void normalize_log(std::vector<double>& y) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : y)
      if (x > m) m = x;
    double t = 0.0;
    for (double x : y) t += std::exp(x - m);
    double z = m + std::log(t);
    for (double& x : y) x -= z;
  }

  std::mt19937_64 gen_;
};

}  // namespace gdp
