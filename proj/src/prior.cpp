#include "gdp/prior.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "gdp/error.hpp"

namespace gdp {

namespace {

void check_simplex(const std::vector<double>& w, int L, const char* what) {
  if (static_cast<int>(w.size()) != L)
    fail(Errc::LengthMismatch, std::string(what) + " has wrong length");
  double sum = 0.0;
  for (double v : w) {
    if (v < 0.0) fail(Errc::ConfigMismatch, std::string(what) + " has negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    fail(Errc::ConfigMismatch, std::string(what) + " does not sum to 1");
}

std::vector<double> scaled(double c, const std::vector<double>& base) {
  std::vector<double> out(base.size());
  for (std::size_t l = 0; l < base.size(); ++l) out[l] = c * base[l];
  return out;
}

}  // namespace

void check_weight_set(const WeightSet& w, const LayeredDag& ldag) {
  int n = ldag.dag.node_count;
  if (static_cast<int>(w.beta.size()) != n + 1)
    fail(Errc::LengthMismatch, "beta table size mismatch");
  for (int j = 1; j <= n; ++j) {
    check_simplex(w.beta[static_cast<std::size_t>(j)], w.L, "beta");
    int k = ldag.layer[static_cast<std::size_t>(j)];
    int expect = (j == ldag.root) ? 0 : std::max(k - 1, 0);
    const auto& chain = w.hidden[static_cast<std::size_t>(j)];
    if (static_cast<int>(chain.size()) != expect)
      fail(Errc::LengthMismatch,
           "hidden chain length mismatch at node " + std::to_string(j));
    for (const auto& h : chain) check_simplex(h, w.L, "hidden weights");
  }
}

std::vector<double> stick_break(double alpha, int L, Rng& rng) {
  if (L < 1) fail(Errc::ConfigMismatch, "stick_break needs L >= 1");
  if (!(alpha > 0.0)) fail(Errc::ZeroConcentration, "stick_break alpha");
  std::vector<double> w(static_cast<std::size_t>(L));
  double remaining = 1.0;
  for (int l = 0; l < L; ++l) {
    double frac = (l == L - 1) ? 1.0 : rng.beta(1.0, alpha);
    w[static_cast<std::size_t>(l)] = frac * remaining;
    remaining *= (1.0 - frac);
  }
  return w;
}

WeightSet sample_finite_gdp(const LayeredDag& ldag, const AlphaVector& alpha,
                            int L, Rng& rng) {
  int n = ldag.dag.node_count;
  WeightSet w;
  w.L = L;
  w.beta.assign(static_cast<std::size_t>(n) + 1, {});
  w.hidden.assign(static_cast<std::size_t>(n) + 1, {});
  w.parent_mix.assign(static_cast<std::size_t>(n) + 1, {});

  double a_root = alpha[static_cast<std::size_t>(ldag.root)];
  w.beta[static_cast<std::size_t>(ldag.root)] = rng.dirichlet(
      std::vector<double>(static_cast<std::size_t>(L), a_root / L));

  for (int j : ldag.topo) {
    if (j == ldag.root) continue;
    int k = ldag.layer[static_cast<std::size_t>(j)];
    double a_j = alpha[static_cast<std::size_t>(j)];
    if (k == 1) {
      w.beta[static_cast<std::size_t>(j)] =
          rng.dirichlet(scaled(a_j, w.beta[static_cast<std::size_t>(ldag.root)]));
      continue;
    }
    HypernodeChain chain = hypernode_chain(ldag, j);
    auto& hid = w.hidden[static_cast<std::size_t>(j)];
    hid.resize(static_cast<std::size_t>(k - 1));
    // hid[i] descends from the root side: its concentration is the
    // generation-(k-1-i) ancestor sum, so hid[0] pairs the deepest
    // (generation k-1) sum with the root weights.
    for (int i = 0; i <= k - 2; ++i) {
      double conc = concentration_sum(
          chain.entries[static_cast<std::size_t>(k - 2 - i)], alpha);
      const std::vector<double>& base =
          (i == 0) ? w.beta[static_cast<std::size_t>(ldag.root)]
                   : hid[static_cast<std::size_t>(i - 1)];
      hid[static_cast<std::size_t>(i)] = rng.dirichlet(scaled(conc, base));
    }
    w.beta[static_cast<std::size_t>(j)] =
        rng.dirichlet(scaled(a_j, hid[static_cast<std::size_t>(k - 2)]));
  }
  return w;
}

WeightSet sample_explicit_mixture_gdp(const LayeredDag& ldag,
                                      const AlphaVector& alpha, int L,
                                      Rng& rng) {
  int n = ldag.dag.node_count;
  WeightSet w;
  w.L = L;
  w.beta.assign(static_cast<std::size_t>(n) + 1, {});
  w.hidden.assign(static_cast<std::size_t>(n) + 1, {});
  w.parent_mix.assign(static_cast<std::size_t>(n) + 1, {});

  double a_root = alpha[static_cast<std::size_t>(ldag.root)];
  w.beta[static_cast<std::size_t>(ldag.root)] = rng.dirichlet(
      std::vector<double>(static_cast<std::size_t>(L), a_root / L));

  for (int j : ldag.topo) {
    if (j == ldag.root) continue;
    const auto& parents = ldag.dag.parents[static_cast<std::size_t>(j)];
    std::vector<double> pconc;
    pconc.reserve(parents.size());
    for (int p : parents) pconc.push_back(alpha[static_cast<std::size_t>(p)]);
    std::vector<double> mix = rng.dirichlet(pconc);
    w.parent_mix[static_cast<std::size_t>(j)] = mix;

    std::vector<double> base(static_cast<std::size_t>(L), 0.0);
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      const auto& pb = w.beta[static_cast<std::size_t>(parents[pi])];
      for (int l = 0; l < L; ++l)
        base[static_cast<std::size_t>(l)] += mix[pi] * pb[static_cast<std::size_t>(l)];
    }
    w.beta[static_cast<std::size_t>(j)] = rng.dirichlet(
        scaled(alpha[static_cast<std::size_t>(j)], base));
  }
  return w;
}

namespace {

// CRP choice on one level: existing table index, or -1 for a new one.
int crp_choose(const RestaurantLevel& level, double conc, Rng& rng) {
  double u = rng.uniform() * (static_cast<double>(level.customers) + conc);
  double acc = 0.0;
  for (std::size_t t = 0; t < level.tables.size(); ++t) {
    acc += static_cast<double>(level.tables[t].count);
    if (u < acc) return static_cast<int>(t);
  }
  return -1;
}

struct Seater {
  const LayeredDag& ldag;
  const AlphaVector& alpha;
  RestaurantState& st;
  std::vector<std::vector<double>> hyper_conc;  // [id][h]
  Rng& rng;

  // Seat one request at the shared root restaurant; a fresh table mints a
  // brand-new dish. Returns the table index.
  int root_seat() {
    RestaurantLevel& root = st.restaurant[static_cast<std::size_t>(ldag.root)];
    int t = crp_choose(root, alpha[static_cast<std::size_t>(ldag.root)], rng);
    if (t < 0) {
      root.tables.push_back({1, st.dish_count++});
      t = static_cast<int>(root.tables.size()) - 1;
    } else {
      ++root.tables[static_cast<std::size_t>(t)].count;
    }
    ++root.customers;
    return t;
  }

  // Seat a table request from node j at hyper level h (0 = parent
  // generation); past the last level the request reaches the root. Returns
  // the dish the request resolved to.
  int escalate(int j, int h) {
    auto& levels = st.hyper[static_cast<std::size_t>(j)];
    if (h >= static_cast<int>(levels.size())) {
      RestaurantLevel& root = st.restaurant[static_cast<std::size_t>(ldag.root)];
      return root.tables[static_cast<std::size_t>(root_seat())].dish;
    }
    RestaurantLevel& level = levels[static_cast<std::size_t>(h)];
    double conc = hyper_conc[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)];
    int t = crp_choose(level, conc, rng);
    int dish;
    if (t < 0) {
      dish = escalate(j, h + 1);
      level.tables.push_back({1, dish});
      t = static_cast<int>(level.tables.size()) - 1;
    } else {
      ++level.tables[static_cast<std::size_t>(t)].count;
      dish = level.tables[static_cast<std::size_t>(t)].dish;
    }
    ++level.customers;
    return dish;
  }

  // Seat one data customer of node j; records table and dish.
  void seat_customer(int j) {
    if (j == ldag.root) {
      int t = root_seat();
      const RestaurantLevel& root = st.restaurant[static_cast<std::size_t>(j)];
      st.customer_table[static_cast<std::size_t>(j)].push_back(t);
      st.customer_dish[static_cast<std::size_t>(j)].push_back(
          root.tables[static_cast<std::size_t>(t)].dish);
      return;
    }
    RestaurantLevel& rest = st.restaurant[static_cast<std::size_t>(j)];
    int t = crp_choose(rest, alpha[static_cast<std::size_t>(j)], rng);
    int dish;
    if (t < 0) {
      dish = escalate(j, 0);
      rest.tables.push_back({1, dish});
      t = static_cast<int>(rest.tables.size()) - 1;
    } else {
      ++rest.tables[static_cast<std::size_t>(t)].count;
      dish = rest.tables[static_cast<std::size_t>(t)].dish;
    }
    ++rest.customers;
    st.customer_table[static_cast<std::size_t>(j)].push_back(t);
    st.customer_dish[static_cast<std::size_t>(j)].push_back(dish);
  }
};

}  // namespace

RestaurantState restaurant_sim(const LayeredDag& ldag, const AlphaVector& alpha,
                               const std::vector<int>& sizes, Rng& rng) {
  int n = ldag.dag.node_count;
  if (static_cast<int>(sizes.size()) != n + 1)
    fail(Errc::LengthMismatch, "sizes must be indexed by node id (slot 0 unused)");
  RestaurantState st;
  st.restaurant.assign(static_cast<std::size_t>(n) + 1, {});
  st.hyper.assign(static_cast<std::size_t>(n) + 1, {});
  st.customer_dish.assign(static_cast<std::size_t>(n) + 1, {});
  st.customer_table.assign(static_cast<std::size_t>(n) + 1, {});

  std::vector<std::vector<double>> hyper_conc(static_cast<std::size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) {
    if (j == ldag.root) continue;
    int k = ldag.layer[static_cast<std::size_t>(j)];
    if (k < 2) continue;
    HypernodeChain chain = hypernode_chain(ldag, j);
    st.hyper[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(k - 1), {});
    auto& conc = hyper_conc[static_cast<std::size_t>(j)];
    for (int h = 0; h <= k - 2; ++h)
      conc.push_back(concentration_sum(chain.entries[static_cast<std::size_t>(h)], alpha));
  }

  Seater seater{ldag, alpha, st, std::move(hyper_conc), rng};
  for (int j : ldag.topo)
    for (int i = 0; i < sizes[static_cast<std::size_t>(j)]; ++i)
      seater.seat_customer(j);
  return st;
}

MomentReport lemma_mixture_oracle(
    const std::vector<std::vector<double>>& alpha_vectors, long n_draws,
    Rng& rng) {
  if (alpha_vectors.empty())
    fail(Errc::ConfigMismatch, "need at least one alpha vector");
  std::size_t dim = alpha_vectors[0].size();
  for (const auto& a : alpha_vectors) {
    if (a.size() != dim) fail(Errc::LengthMismatch, "alpha vectors disagree on length");
    for (double v : a)
      if (!(v > 0.0)) fail(Errc::ZeroConcentration, "alpha entries must be positive");
  }

  std::vector<double> row_sums(alpha_vectors.size(), 0.0);
  std::vector<double> total(dim, 0.0);
  for (std::size_t i = 0; i < alpha_vectors.size(); ++i)
    for (std::size_t l = 0; l < dim; ++l) {
      row_sums[i] += alpha_vectors[i][l];
      total[l] += alpha_vectors[i][l];
    }

  std::vector<double> s1(dim, 0.0), s2(dim, 0.0), s3(dim, 0.0), s4(dim, 0.0);
  std::vector<double> mix(dim);
  for (long t = 0; t < n_draws; ++t) {
    std::vector<double> pi = rng.dirichlet(row_sums);
    std::fill(mix.begin(), mix.end(), 0.0);
    for (std::size_t i = 0; i < alpha_vectors.size(); ++i) {
      std::vector<double> x = rng.dirichlet(alpha_vectors[i]);
      for (std::size_t l = 0; l < dim; ++l) mix[l] += pi[i] * x[l];
    }
    for (std::size_t l = 0; l < dim; ++l) {
      double v = mix[l];
      s1[l] += v;
      s2[l] += v * v;
      s3[l] += v * v * v;
      s4[l] += v * v * v * v;
    }
  }

  MomentReport rep;
  rep.draws = n_draws;
  double n = static_cast<double>(n_draws);
  double tsum = 0.0;
  for (double v : total) tsum += v;
  rep.empirical_mean.resize(dim);
  rep.empirical_var.resize(dim);
  rep.analytic_mean.resize(dim);
  rep.analytic_var.resize(dim);
  rep.se_mean.resize(dim);
  rep.se_var.resize(dim);
  for (std::size_t l = 0; l < dim; ++l) {
    double m = s1[l] / n;
    double var = s2[l] / n - m * m;
    // Central fourth moment from raw sums; gives the variance of the
    // sample variance, hence its Monte Carlo SE.
    double m4 = s4[l] / n - 4.0 * m * s3[l] / n + 6.0 * m * m * s2[l] / n -
                3.0 * m * m * m * m;
    rep.empirical_mean[l] = m;
    rep.empirical_var[l] = var * n / (n - 1.0);
    rep.analytic_mean[l] = total[l] / tsum;
    rep.analytic_var[l] =
        total[l] * (tsum - total[l]) / (tsum * tsum * (tsum + 1.0));
    rep.se_mean[l] = std::sqrt(var / n);
    rep.se_var[l] = std::sqrt(std::max(m4 - var * var, 0.0) / n);
    rep.max_mean_z = std::max(
        rep.max_mean_z, std::abs(m - rep.analytic_mean[l]) / rep.se_mean[l]);
    rep.max_var_z =
        std::max(rep.max_var_z, std::abs(rep.empirical_var[l] - rep.analytic_var[l]) /
                                    std::max(rep.se_var[l], 1e-300));
  }
  return rep;
}

SyntheticData generate_synthetic(const LayeredDag& ldag,
                                 const ScenarioSpec& spec, Rng& rng) {
  int n = ldag.dag.node_count;
  std::vector<int> data_nodes;
  for (int j = 1; j <= n; ++j)
    if (!(ldag.hidden_root_added && j == ldag.root)) data_nodes.push_back(j);
  std::size_t G = data_nodes.size();

  if (spec.sizes.size() != G || spec.group_covs.size() != G)
    fail(Errc::ConfigMismatch, "scenario sizes/covariances do not match group count");
  if (spec.cluster_means.empty())
    fail(Errc::ConfigMismatch, "scenario needs at least one cluster mean");
  int d = static_cast<int>(spec.cluster_means[0].size());
  for (const auto& m : spec.cluster_means)
    if (m.size() != d) fail(Errc::DimensionMismatch, "cluster means disagree on dim");
  for (const auto& c : spec.group_covs)
    if (c.rows() != d || c.cols() != d)
      fail(Errc::DimensionMismatch, "group covariance has wrong shape");
  int M = static_cast<int>(spec.cluster_means.size());

  std::vector<int> node_group(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t g = 0; g < G; ++g)
    node_group[static_cast<std::size_t>(data_nodes[g])] = static_cast<int>(g);

  std::vector<std::vector<double>> weights(G);
  if (spec.weights_from_prior) {
    AlphaVector alpha = sample_alphas(ldag, spec.prior_alpha0, rng);
    WeightSet ws = sample_finite_gdp(ldag, alpha, M, rng);
    for (std::size_t g = 0; g < G; ++g)
      weights[g] = ws.beta[static_cast<std::size_t>(data_nodes[g])];
  } else {
    if (spec.fixed_weights.size() != G)
      fail(Errc::ConfigMismatch, "fixed_weights must have one row per group");
    for (int j : ldag.topo) {
      int g = node_group[static_cast<std::size_t>(j)];
      if (g < 0) continue;
      const auto& row = spec.fixed_weights[static_cast<std::size_t>(g)];
      if (!row.empty()) {
        check_simplex(row, M, "fixed weight row");
        weights[static_cast<std::size_t>(g)] = row;
        continue;
      }
      // Empty row: average the parents' weight rows.
      const auto& parents = ldag.dag.parents[static_cast<std::size_t>(j)];
      if (parents.empty())
        fail(Errc::ConfigMismatch, "root group needs explicit weights");
      std::vector<double> avg(static_cast<std::size_t>(M), 0.0);
      for (int p : parents) {
        int pg = node_group[static_cast<std::size_t>(p)];
        if (pg < 0 || weights[static_cast<std::size_t>(pg)].empty())
          fail(Errc::ConfigMismatch,
               "parent weights unresolved for group of node " + std::to_string(j));
        for (int l = 0; l < M; ++l)
          avg[static_cast<std::size_t>(l)] +=
              weights[static_cast<std::size_t>(pg)][static_cast<std::size_t>(l)] /
              static_cast<double>(parents.size());
      }
      weights[static_cast<std::size_t>(g)] = avg;
    }
  }

  SyntheticData out;
  out.weights = weights;
  out.data.dim = d;
  out.data.group_node = data_nodes;
  out.data.groups.resize(G);
  out.data.true_labels.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    Eigen::LLT<Eigen::MatrixXd> llt(spec.group_covs[g]);
    if (llt.info() != Eigen::Success)
      fail(Errc::CholeskyFailure, "group covariance not positive-definite");
    Eigen::MatrixXd Lc = llt.matrixL();
    int ng = spec.sizes[g];
    out.data.groups[g].resize(ng, d);
    out.data.true_labels[g].resize(static_cast<std::size_t>(ng));
    for (int i = 0; i < ng; ++i) {
      int z = rng.categorical(weights[g]);
      out.data.true_labels[g][static_cast<std::size_t>(i)] = z;
      Eigen::VectorXd eps(d);
      for (int c = 0; c < d; ++c) eps(c) = rng.normal();
      out.data.groups[g].row(i) =
          (spec.cluster_means[static_cast<std::size_t>(z)] + Lc * eps).transpose();
    }
  }
  validate_dataset(out.data);
  return out;
}

}  // namespace gdp
