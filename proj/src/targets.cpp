#include <cmath>
#include <limits>
#include <vector>

#include "gdp/gibbs.hpp"
#include "gdp/mathutil.hpp"

namespace gdp {

namespace {

// Contribution of one Dirichlet edge w ~ Dir(c * b) to the log density of b,
// keeping every b-dependent term: log Gamma(c) - sum_l log Gamma(c b_l)
// + sum_l c b_l log w_l.  The -1 in the exponent does not involve b. Both
// vectors arrive as log weights, so the term stays exact when either side is
// degenerate far past linear underflow. Only hidden-chain edges appear here:
// the drawn vector w is always a kernel state, whose log weights are exact
// doubles, never floored draws.
double dependent_term(double c, const std::vector<double>& log_b,
                      const std::vector<double>& log_w) {
  double log_c = std::log(c);
  double lp = std::lgamma(c);
  for (std::size_t l = 0; l < log_b.size(); ++l) {
    double cb_log = log_c + log_b[l];
    lp += -lgamma_from_log(cb_log) + std::exp(cb_log) * log_w[l];
  }
  return lp;
}

// The h-dependent part of the Dirichlet-multinomial mass of one node's
// counts against base h scaled by a: sum_l log Gamma(a h_l + n_l)
// - log Gamma(a h_l). Integrating the node's weight vector out of the
// conditionals removes the only draws whose log weights can sink past double
// range, so every remaining target input is exactly representable. For a
// degenerate coordinate the difference collapses to log Gamma(n) + log(a h).
double dm_term(double log_a, const std::vector<double>& log_h,
               const std::vector<int>& counts) {
  double lp = 0.0;
  for (std::size_t l = 0; l < log_h.size(); ++l) {
    int n = counts[l];
    if (n == 0) continue;
    double ah_log = log_a + log_h[l];
    if (ah_log > -30.0) {
      double ah = std::exp(ah_log);
      lp += std::lgamma(ah + n) - std::lgamma(ah);
    } else {
      lp += std::lgamma(static_cast<double>(n)) + ah_log;
    }
  }
  return lp;
}

long count_total(const std::vector<int>& counts) {
  long n = 0;
  for (int c : counts) n += c;
  return n;
}

// lgamma(exp(y + dy)) - lgamma(exp(y)) with dy supplied separately. When both
// arguments sit in the near-zero regime the divergent -log parts cancel to
// exactly -dy however large |y| is, which forming the two totals and
// subtracting them cannot do once |y| outgrows the 1e-16 relative rounding of
// a double.
double lgamma_log_ratio(double y, double dy) {
  double y_new = y + dy;
  if (y > -30.0 && y_new > -30.0)
    return std::lgamma(std::exp(y_new)) - std::lgamma(std::exp(y));
  if (y <= -30.0 && y_new <= -30.0)
    return -dy - kEulerGamma * std::exp(y) * std::expm1(dy);
  return lgamma_from_log(y_new) - lgamma_from_log(y);
}

// exp(y + dy) - exp(y) without forming the near-equal pair.
double exp_diff(double y, double dy) {
  return std::exp(y) * std::expm1(dy);
}

// One coordinate of the Dirichlet-multinomial mass at log(a h_l) = y.
double dm_coord(double y, int n) {
  if (y > -30.0) {
    double ah = std::exp(y);
    return std::lgamma(ah + n) - std::lgamma(ah);
  }
  return std::lgamma(static_cast<double>(n)) + y;
}

// Change of dm_term when every log(a h_l) moves by the exact increment
// delta(l) (a base move leaves log a fixed; a concentration move leaves the
// base fixed, the two cases differing only in where the shared log lands).
// In the degenerate regime the mass is lgamma(n) + y per coordinate, so the
// change is the increment itself.
template <class Delta>
double dm_ratio(double log_a, const std::vector<double>& log_h,
                const std::vector<int>& counts, Delta delta) {
  double lp = 0.0;
  for (std::size_t l = 0; l < log_h.size(); ++l) {
    int n = counts[l];
    if (n == 0) continue;
    double y = log_a + log_h[l];
    double dy = delta(l);
    double y_new = y + dy;
    if (y <= -30.0 && y_new <= -30.0)
      lp += dy;
    else
      lp += dm_coord(y_new, n) - dm_coord(y, n);
  }
  return lp;
}

// Change of dependent_term when the base vector b moves by delta(l) per
// coordinate, the concentration c and drawn vector w staying fixed. The
// lgamma(c) normalizer drops out; each coordinate contributes the ratio of
// its -lgamma(c b_l) piece plus (c b'_l - c b_l) log w_l, the latter built
// from expm1 of the increment so nothing near-equal is ever subtracted.
template <class Delta>
double dependent_ratio(double c, const std::vector<double>& log_b,
                       const std::vector<double>& log_w, Delta delta) {
  double log_c = std::log(c);
  double lp = 0.0;
  for (std::size_t l = 0; l < log_b.size(); ++l) {
    double y = log_c + log_b[l];
    double dy = delta(l);
    lp += -lgamma_log_ratio(y, dy) + exp_diff(y, dy) * log_w[l];
  }
  return lp;
}

}  // namespace

double GibbsEngine::logtarget_root_beta(const ChainState& s,
                                        const std::vector<double>& log_b) const {
  int root = ldag_.root;
  double a_root = s.alpha[static_cast<std::size_t>(root)];
  // A hidden root carries no data, so its count row stays all zero and the
  // kernel reduces to the symmetric Dirichlet exponent.
  const auto& counts = s.counts[static_cast<std::size_t>(root)];
  double lp = 0.0;
  for (std::size_t l = 0; l < log_b.size(); ++l) {
    double e = static_cast<double>(counts[l]) +
               a_root / static_cast<double>(cfg_.L) - 1.0;
    lp += e * log_b[l];
  }
  // Layer-1 children enter through the Dirichlet-multinomial mass of their
  // counts, their own weight vectors being integrated out; deeper children
  // attach through the first vector of their hidden chain.
  for (int j = 1; j <= ldag_.dag.node_count; ++j) {
    if (j == root) continue;
    if (ldag_.layer[static_cast<std::size_t>(j)] == 1) {
      lp += dm_term(std::log(s.alpha[static_cast<std::size_t>(j)]), log_b,
                    s.counts[static_cast<std::size_t>(j)]);
    } else {
      lp += dependent_term(hidden_conc(s.alpha, j, 0), log_b,
                           s.log_hidden[static_cast<std::size_t>(j)][0]);
    }
  }
  return lp;
}

double GibbsEngine::logtarget_hidden(const ChainState& s, int node, int level,
                                     const std::vector<double>& log_v) const {
  int k = ldag_.layer[static_cast<std::size_t>(node)];
  const std::vector<double>& log_up =
      (level == 0)
          ? s.log_beta[static_cast<std::size_t>(ldag_.root)]
          : s.log_hidden[static_cast<std::size_t>(node)][static_cast<std::size_t>(level - 1)];
  double log_cup = std::log(hidden_conc(s.alpha, node, level));

  double lp = 0.0;
  for (std::size_t l = 0; l < log_v.size(); ++l)
    lp += (std::exp(log_cup + log_up[l]) - 1.0) * log_v[l];

  // The innermost vector sees the node's counts with the node's weights
  // integrated out; deeper vectors see the next hidden level.
  if (level == k - 2) {
    lp += dm_term(std::log(s.alpha[static_cast<std::size_t>(node)]), log_v,
                  s.counts[static_cast<std::size_t>(node)]);
  } else {
    lp += dependent_term(
        hidden_conc(s.alpha, node, level + 1), log_v,
        s.log_hidden[static_cast<std::size_t>(node)][static_cast<std::size_t>(level + 1)]);
  }
  return lp;
}

double GibbsEngine::logtarget_alpha(const ChainState& s, int node,
                                    double a) const {
  if (!(a > 0.0) || !std::isfinite(a))
    return -std::numeric_limits<double>::infinity();
  int root = ldag_.root;
  int L = cfg_.L;

  // Gamma prior with unit rate; the shape is alpha0 at the root and the sum
  // of the parents' concentrations elsewhere.
  double shape;
  if (node == root) {
    shape = cfg_.alpha0;
  } else {
    shape = 0.0;
    for (int p : ldag_.dag.parents[static_cast<std::size_t>(node)])
      shape += s.alpha[static_cast<std::size_t>(p)];
  }
  double lp = -a + (shape - 1.0) * std::log(a);

  // Children's Gamma shapes contain this concentration through their parent
  // sums, so both the shape exponent and its normalizer move with a.
  for (int c : ldag_.dag.children[static_cast<std::size_t>(node)]) {
    double shape_c = 0.0;
    for (int p : ldag_.dag.parents[static_cast<std::size_t>(c)])
      shape_c += (p == node) ? a : s.alpha[static_cast<std::size_t>(p)];
    double a_c = s.alpha[static_cast<std::size_t>(c)];
    lp += (shape_c - 1.0) * std::log(a_c) - std::lgamma(shape_c) - a_c;
  }

  // The node's own weights: the root keeps its symmetric Dirichlet exponent
  // over the kernel-held root weights; every other node's vector is
  // integrated out, leaving the Dirichlet-multinomial mass of its counts
  // against the nearest support vector under concentration a.
  if (node == root) {
    const auto& log_b = s.log_beta[static_cast<std::size_t>(root)];
    double aL = a / static_cast<double>(L);
    lp += std::lgamma(a) - static_cast<double>(L) * std::lgamma(aL);
    for (int l = 0; l < L; ++l)
      lp += (aL - 1.0) * log_b[static_cast<std::size_t>(l)];
  } else {
    const auto& counts = s.counts[static_cast<std::size_t>(node)];
    long n_total = count_total(counts);
    if (n_total > 0) {
      int k = ldag_.layer[static_cast<std::size_t>(node)];
      const std::vector<double>& log_h =
          (k == 1) ? s.log_beta[static_cast<std::size_t>(root)]
                   : s.log_hidden[static_cast<std::size_t>(node)]
                                 [static_cast<std::size_t>(k - 2)];
      lp += std::lgamma(a) - std::lgamma(a + static_cast<double>(n_total)) +
            dm_term(std::log(a), log_h, counts);
    }
  }

  // Hidden chain levels whose concentration multiset contains this node.
  for (const ChainDep& dep : alpha_chain_deps_[static_cast<std::size_t>(node)]) {
    double conc = hidden_conc(s.alpha, dep.node, dep.level) -
                  dep.mult * s.alpha[static_cast<std::size_t>(node)] + dep.mult * a;
    const std::vector<double>& log_up =
        (dep.level == 0)
            ? s.log_beta[static_cast<std::size_t>(root)]
            : s.log_hidden[static_cast<std::size_t>(dep.node)]
                          [static_cast<std::size_t>(dep.level - 1)];
    const std::vector<double>& log_x =
        s.log_hidden[static_cast<std::size_t>(dep.node)]
                    [static_cast<std::size_t>(dep.level)];
    double log_conc = std::log(conc);
    lp += std::lgamma(conc);
    for (int l = 0; l < L; ++l) {
      double cu_log = log_conc + log_up[static_cast<std::size_t>(l)];
      lp += -lgamma_from_log(cu_log) +
            (std::exp(cu_log) - 1.0) * log_x[static_cast<std::size_t>(l)];
    }
  }
  return lp;
}

double GibbsEngine::logtarget_root_beta_ratio(const ChainState& s,
                                              const SimplexMove& move) const {
  int root = ldag_.root;
  double a_root = s.alpha[static_cast<std::size_t>(root)];
  const auto& counts = s.counts[static_cast<std::size_t>(root)];
  auto delta = [&move](std::size_t l) { return move.delta(l); };

  double lp = 0.0;
  for (std::size_t l = 0; l < move.cur.size(); ++l) {
    double e = static_cast<double>(counts[l]) +
               a_root / static_cast<double>(cfg_.L) - 1.0;
    lp += e * move.delta(l);
  }
  for (int j = 1; j <= ldag_.dag.node_count; ++j) {
    if (j == root) continue;
    if (ldag_.layer[static_cast<std::size_t>(j)] == 1) {
      lp += dm_ratio(std::log(s.alpha[static_cast<std::size_t>(j)]), move.cur,
                     s.counts[static_cast<std::size_t>(j)], delta);
    } else {
      lp += dependent_ratio(hidden_conc(s.alpha, j, 0), move.cur,
                            s.log_hidden[static_cast<std::size_t>(j)][0], delta);
    }
  }
  return lp;
}

double GibbsEngine::logtarget_hidden_ratio(const ChainState& s, int node,
                                           int level,
                                           const SimplexMove& move) const {
  int k = ldag_.layer[static_cast<std::size_t>(node)];
  const std::vector<double>& log_up =
      (level == 0)
          ? s.log_beta[static_cast<std::size_t>(ldag_.root)]
          : s.log_hidden[static_cast<std::size_t>(node)][static_cast<std::size_t>(level - 1)];
  double log_cup = std::log(hidden_conc(s.alpha, node, level));
  auto delta = [&move](std::size_t l) { return move.delta(l); };

  double lp = 0.0;
  for (std::size_t l = 0; l < move.cur.size(); ++l)
    lp += (std::exp(log_cup + log_up[l]) - 1.0) * move.delta(l);

  if (level == k - 2) {
    lp += dm_ratio(std::log(s.alpha[static_cast<std::size_t>(node)]), move.cur,
                   s.counts[static_cast<std::size_t>(node)], delta);
  } else {
    lp += dependent_ratio(
        hidden_conc(s.alpha, node, level + 1), move.cur,
        s.log_hidden[static_cast<std::size_t>(node)][static_cast<std::size_t>(level + 1)],
        delta);
  }
  return lp;
}

double GibbsEngine::logtarget_alpha_ratio(const ChainState& s, int node,
                                          double a) const {
  double a_cur = s.alpha[static_cast<std::size_t>(node)];
  if (!(a > 0.0) || !std::isfinite(a))
    return -std::numeric_limits<double>::infinity();
  int root = ldag_.root;
  int L = cfg_.L;
  double dlog_a = std::log(a) - std::log(a_cur);

  // Gamma prior with unit rate.
  double shape;
  if (node == root) {
    shape = cfg_.alpha0;
  } else {
    shape = 0.0;
    for (int p : ldag_.dag.parents[static_cast<std::size_t>(node)])
      shape += s.alpha[static_cast<std::size_t>(p)];
  }
  double lp = -(a - a_cur) + (shape - 1.0) * dlog_a;

  // Children's Gamma shapes shift by exactly a - a_cur.
  for (int c : ldag_.dag.children[static_cast<std::size_t>(node)]) {
    double shape_cur = 0.0;
    for (int p : ldag_.dag.parents[static_cast<std::size_t>(c)])
      shape_cur += s.alpha[static_cast<std::size_t>(p)];
    double shape_new = shape_cur - a_cur + a;
    double a_c = s.alpha[static_cast<std::size_t>(c)];
    lp += (a - a_cur) * std::log(a_c) - std::lgamma(shape_new) +
          std::lgamma(shape_cur);
  }

  if (node == root) {
    const auto& log_b = s.log_beta[static_cast<std::size_t>(root)];
    double dL = static_cast<double>(L);
    lp += std::lgamma(a) - std::lgamma(a_cur) -
          dL * (std::lgamma(a / dL) - std::lgamma(a_cur / dL));
    double sum_log_b = 0.0;
    for (int l = 0; l < L; ++l) sum_log_b += log_b[static_cast<std::size_t>(l)];
    lp += (a - a_cur) / dL * sum_log_b;
  } else {
    const auto& counts = s.counts[static_cast<std::size_t>(node)];
    long n_total = count_total(counts);
    if (n_total > 0) {
      int k = ldag_.layer[static_cast<std::size_t>(node)];
      const std::vector<double>& log_h =
          (k == 1) ? s.log_beta[static_cast<std::size_t>(root)]
                   : s.log_hidden[static_cast<std::size_t>(node)]
                                 [static_cast<std::size_t>(k - 2)];
      double n = static_cast<double>(n_total);
      lp += std::lgamma(a) - std::lgamma(a_cur) -
            (std::lgamma(a + n) - std::lgamma(a_cur + n));
      lp += dm_ratio(std::log(a_cur), log_h, counts,
                     [dlog_a](std::size_t) { return dlog_a; });
    }
  }

  // Hidden chain levels whose concentration moves with this node. The log
  // concentration increment is shared by every coordinate, so the edge ratio
  // is the base-move formula with a constant shift.
  for (const ChainDep& dep : alpha_chain_deps_[static_cast<std::size_t>(node)]) {
    double c_cur = hidden_conc(s.alpha, dep.node, dep.level);
    double c_new = c_cur - dep.mult * a_cur + dep.mult * a;
    double dlog_c = std::log(c_new) - std::log(c_cur);
    const std::vector<double>& log_up =
        (dep.level == 0)
            ? s.log_beta[static_cast<std::size_t>(root)]
            : s.log_hidden[static_cast<std::size_t>(dep.node)]
                          [static_cast<std::size_t>(dep.level - 1)];
    const std::vector<double>& log_x =
        s.log_hidden[static_cast<std::size_t>(dep.node)]
                    [static_cast<std::size_t>(dep.level)];
    lp += std::lgamma(c_new) - std::lgamma(c_cur);
    lp += dependent_ratio(c_cur, log_up, log_x,
                          [dlog_c](std::size_t) { return dlog_c; });
  }
  return lp;
}

double GibbsEngine::total_loglik(const ChainState& s) const {
  int L = cfg_.L;
  double total = 0.0;
  std::vector<double> logw(static_cast<std::size_t>(L));
  for (std::size_t g = 0; g < data_.groups.size(); ++g) {
    int id = data_.group_node[g];
    const auto& logbeta = s.log_beta[static_cast<std::size_t>(id)];
    const Eigen::MatrixXd& Xt = groups_t_[g];
    for (long i = 0; i < Xt.cols(); ++i) {
      for (int l = 0; l < L; ++l)
        logw[static_cast<std::size_t>(l)] =
            logbeta[static_cast<std::size_t>(l)] +
            s.atoms[static_cast<std::size_t>(l)].loglik(Xt.col(i));
      total += logsumexp(logw);
    }
  }
  return total;
}

}  // namespace gdp
