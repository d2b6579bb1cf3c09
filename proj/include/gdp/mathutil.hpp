#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace gdp {

inline double logsumexp(const std::vector<double>& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x)
    if (v > m) m = v;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

inline double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double var_of(const std::vector<double>& x) {
  double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Standard error of the mean for independent draws.
inline double iid_se(const std::vector<double>& x) {
  return std::sqrt(var_of(x) / static_cast<double>(x.size()));
}

// Batch-means standard error for autocorrelated (MCMC) draws. Splits the
// series into `nbatch` contiguous batches and uses the batch means' spread.
inline double batch_se(const std::vector<double>& x, int nbatch = 100) {
  std::size_t n = x.size();
  std::size_t b = n / static_cast<std::size_t>(nbatch);
  if (b < 2) return iid_se(x);
  std::vector<double> bm(static_cast<std::size_t>(nbatch));
  for (int k = 0; k < nbatch; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < b; ++i) s += x[static_cast<std::size_t>(k) * b + i];
    bm[static_cast<std::size_t>(k)] = s / static_cast<double>(b);
  }
  return std::sqrt(var_of(bm) / static_cast<double>(nbatch));
}

// log Dirichlet(conc) density at w, both length L; w on the open simplex.
inline double dirichlet_logpdf(const std::vector<double>& w,
                               const std::vector<double>& conc) {
  double lp = 0.0;
  double csum = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    lp += (conc[l] - 1.0) * std::log(w[l]) - std::lgamma(conc[l]);
    csum += conc[l];
  }
  return lp + std::lgamma(csum);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }
inline double expit(double y) { return 1.0 / (1.0 + std::exp(-y)); }

// log(1 + exp(y)) without overflow for large |y|.
inline double log1pexp(double y) {
  if (y > 0.0) return y + std::log1p(std::exp(-y));
  return std::log1p(std::exp(y));
}

constexpr double kEulerGamma = 0.57721566490153286;

// log Gamma(x) with x supplied as log(x). Near zero lgamma(x) equals
// -log(x) - EulerGamma * x + O(x^2), so the value stays exact for arguments
// far below the smallest positive double where exp(log_x) underflows.
inline double lgamma_from_log(double log_x) {
  if (log_x > -30.0) return std::lgamma(std::exp(log_x));
  return -log_x - kEulerGamma * std::exp(log_x);
}

}  // namespace gdp
