#include "gdp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdp/error.hpp"
#include "gdp/parallel.hpp"

namespace gdp {

namespace {

double floored_log(double w) {
  return std::max(std::log(w), Rng::kLogDrawFloor);
}

// conc shifted onto each log weight: log(c * exp(v_l)) per element.
std::vector<double> shift_logs(double log_c, const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t l = 0; l < v.size(); ++l) out[l] = log_c + v[l];
  return out;
}

void exp_into(const std::vector<double>& logs, std::vector<double>& out) {
  out.resize(logs.size());
  for (std::size_t l = 0; l < logs.size(); ++l) out[l] = std::exp(logs[l]);
}

}  // namespace

void refresh_log_weights(ChainState& s) {
  s.log_beta.resize(s.weights.beta.size());
  for (std::size_t j = 0; j < s.weights.beta.size(); ++j) {
    s.log_beta[j].resize(s.weights.beta[j].size());
    for (std::size_t l = 0; l < s.weights.beta[j].size(); ++l)
      s.log_beta[j][l] = floored_log(s.weights.beta[j][l]);
  }
  s.log_hidden.resize(s.weights.hidden.size());
  for (std::size_t j = 0; j < s.weights.hidden.size(); ++j) {
    s.log_hidden[j].resize(s.weights.hidden[j].size());
    for (std::size_t i = 0; i < s.weights.hidden[j].size(); ++i) {
      s.log_hidden[j][i].resize(s.weights.hidden[j][i].size());
      for (std::size_t l = 0; l < s.weights.hidden[j][i].size(); ++l)
        s.log_hidden[j][i][l] = floored_log(s.weights.hidden[j][i][l]);
    }
  }
}

GibbsEngine::GibbsEngine(const LayeredDag& ldag, const GdpConfig& cfg,
                         const GroupedDataset& data)
    : ldag_(ldag), cfg_(cfg), data_(data) {
  validate_config(cfg_);
  validate_dataset(data_);
  int n = ldag_.dag.node_count;
  if (data_.dim != static_cast<int>(cfg_.niw.mean.size()))
    fail(Errc::ConfigMismatch, "NIW prior dimension differs from data");

  node_group_.assign(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t g = 0; g < data_.group_node.size(); ++g) {
    int id = data_.group_node[g];
    if (id < 1 || id > n)
      fail(Errc::ConfigMismatch, "group mapped to unknown node " + std::to_string(id));
    if (ldag_.hidden_root_added && id == ldag_.root)
      fail(Errc::ConfigMismatch, "hidden root cannot carry data");
    node_group_[static_cast<std::size_t>(id)] = static_cast<int>(g);
  }
  for (int j = 1; j <= n; ++j) {
    bool hidden = ldag_.hidden_root_added && j == ldag_.root;
    if (!hidden && node_group_[static_cast<std::size_t>(j)] < 0)
      fail(Errc::ConfigMismatch,
           "node " + std::to_string(j) + " has no data group");
  }

  chains_.resize(static_cast<std::size_t>(n) + 1);
  alpha_chain_deps_.resize(static_cast<std::size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) {
    if (j == ldag_.root || ldag_.layer[static_cast<std::size_t>(j)] < 2) continue;
    chains_[static_cast<std::size_t>(j)] = hypernode_chain(ldag_, j);
    int k = ldag_.layer[static_cast<std::size_t>(j)];
    for (int i = 0; i <= k - 2; ++i) {
      const AncestorMultiset& ms =
          chains_[static_cast<std::size_t>(j)].entries[static_cast<std::size_t>(k - 2 - i)];
      for (auto [anc, mult] : ms)
        alpha_chain_deps_[static_cast<std::size_t>(anc)].push_back(
            {j, i, static_cast<double>(mult)});
    }
  }

  groups_t_.reserve(data_.groups.size());
  for (const auto& g : data_.groups) groups_t_.push_back(g.transpose());
}

double GibbsEngine::hidden_conc(const AlphaVector& alpha, int node,
                                int level) const {
  int k = ldag_.layer[static_cast<std::size_t>(node)];
  return concentration_sum(
      chains_[static_cast<std::size_t>(node)].entries[static_cast<std::size_t>(k - 2 - level)],
      alpha);
}

void GibbsEngine::init_weights(ChainState& s, Rng& rng) const {
  int n = ldag_.dag.node_count;
  int L = cfg_.L;
  int root = ldag_.root;
  s.weights.L = L;
  s.weights.beta.assign(static_cast<std::size_t>(n) + 1, {});
  s.weights.hidden.assign(static_cast<std::size_t>(n) + 1, {});
  s.weights.parent_mix.assign(static_cast<std::size_t>(n) + 1, {});
  s.log_beta.assign(static_cast<std::size_t>(n) + 1, {});
  s.log_hidden.assign(static_cast<std::size_t>(n) + 1, {});

  double a_root = s.alpha[static_cast<std::size_t>(root)];
  s.log_beta[static_cast<std::size_t>(root)] = rng.dirichlet_log(
      std::vector<double>(static_cast<std::size_t>(L), a_root / L));

  for (int j : ldag_.topo) {
    if (j == root) continue;
    int k = ldag_.layer[static_cast<std::size_t>(j)];
    double log_aj = std::log(s.alpha[static_cast<std::size_t>(j)]);
    if (k == 1) {
      s.log_beta[static_cast<std::size_t>(j)] = rng.dirichlet_from_log_conc(
          shift_logs(log_aj, s.log_beta[static_cast<std::size_t>(root)]));
      continue;
    }
    auto& lhid = s.log_hidden[static_cast<std::size_t>(j)];
    lhid.resize(static_cast<std::size_t>(k - 1));
    for (int i = 0; i <= k - 2; ++i) {
      double log_conc = std::log(hidden_conc(s.alpha, j, i));
      const std::vector<double>& base =
          (i == 0) ? s.log_beta[static_cast<std::size_t>(root)]
                   : lhid[static_cast<std::size_t>(i - 1)];
      lhid[static_cast<std::size_t>(i)] =
          rng.dirichlet_from_log_conc(shift_logs(log_conc, base));
    }
    s.log_beta[static_cast<std::size_t>(j)] = rng.dirichlet_from_log_conc(
        shift_logs(log_aj, lhid[static_cast<std::size_t>(k - 2)]));
  }

  for (int j = 1; j <= n; ++j) {
    exp_into(s.log_beta[static_cast<std::size_t>(j)],
             s.weights.beta[static_cast<std::size_t>(j)]);
    auto& hid = s.weights.hidden[static_cast<std::size_t>(j)];
    hid.resize(s.log_hidden[static_cast<std::size_t>(j)].size());
    for (std::size_t i = 0; i < hid.size(); ++i)
      exp_into(s.log_hidden[static_cast<std::size_t>(j)][i], hid[i]);
  }
}

ChainState GibbsEngine::init_state(Rng& rng) const {
  ChainState s;
  s.alpha = sample_alphas(ldag_, cfg_.alpha0, rng);
  init_weights(s, rng);
  s.atoms.reserve(static_cast<std::size_t>(cfg_.L));
  for (int l = 0; l < cfg_.L; ++l) s.atoms.push_back(niw_sample(cfg_.niw, rng));
  s.labels.resize(data_.groups.size());
  for (std::size_t g = 0; g < data_.groups.size(); ++g) {
    const auto& beta = s.weights.beta[static_cast<std::size_t>(data_.group_node[g])];
    s.labels[g].resize(static_cast<std::size_t>(data_.groups[g].rows()));
    for (auto& z : s.labels[g]) z = rng.categorical(beta);
  }
  s.counts = recompute_counts(s);
  s.loglik = total_loglik(s);
  return s;
}

std::vector<std::vector<int>> GibbsEngine::recompute_counts(
    const ChainState& s) const {
  std::vector<std::vector<int>> counts(
      static_cast<std::size_t>(ldag_.dag.node_count) + 1,
      std::vector<int>(static_cast<std::size_t>(cfg_.L), 0));
  for (std::size_t g = 0; g < s.labels.size(); ++g) {
    auto& row = counts[static_cast<std::size_t>(data_.group_node[g])];
    for (int z : s.labels[g]) ++row[static_cast<std::size_t>(z)];
  }
  return counts;
}

void GibbsEngine::update_labels(ChainState& s, Rng& rng) const {
  int L = cfg_.L;
  std::vector<double> logw(static_cast<std::size_t>(L)), w(static_cast<std::size_t>(L));
  for (std::size_t g = 0; g < data_.groups.size(); ++g) {
    int id = data_.group_node[g];
    const auto& logbeta = s.log_beta[static_cast<std::size_t>(id)];
    auto& counts = s.counts[static_cast<std::size_t>(id)];
    const Eigen::MatrixXd& Xt = groups_t_[g];
    for (long i = 0; i < Xt.cols(); ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (int l = 0; l < L; ++l) {
        double lw = logbeta[static_cast<std::size_t>(l)] +
                    s.atoms[static_cast<std::size_t>(l)].loglik(Xt.col(i));
        logw[static_cast<std::size_t>(l)] = lw;
        if (lw > m) m = lw;
      }
      if (!std::isfinite(m))
        fail(Errc::AllZeroMass,
             "label probabilities vanish for observation " + std::to_string(i) +
                 " of node " + std::to_string(id));
      double tot = 0.0;
      for (int l = 0; l < L; ++l) {
        w[static_cast<std::size_t>(l)] = std::exp(logw[static_cast<std::size_t>(l)] - m);
        tot += w[static_cast<std::size_t>(l)];
      }
      double u = rng.uniform() * tot;
      int z = L - 1;
      double acc = 0.0;
      for (int l = 0; l < L; ++l) {
        acc += w[static_cast<std::size_t>(l)];
        if (u <= acc) {
          z = l;
          break;
        }
      }
      int old = s.labels[g][static_cast<std::size_t>(i)];
      if (old != z) {
        --counts[static_cast<std::size_t>(old)];
        ++counts[static_cast<std::size_t>(z)];
        s.labels[g][static_cast<std::size_t>(i)] = z;
      }
    }
  }
}

void GibbsEngine::update_atoms(ChainState& s, Rng& rng) const {
  int L = cfg_.L;
  int d = data_.dim;
  for (int l = 0; l < L; ++l) {
    long n_l = 0;
    for (std::size_t g = 0; g < data_.groups.size(); ++g)
      n_l += s.counts[static_cast<std::size_t>(data_.group_node[g])]
                     [static_cast<std::size_t>(l)];
    Eigen::MatrixXd pooled(n_l, d);
    long row = 0;
    for (std::size_t g = 0; g < data_.groups.size(); ++g)
      for (std::size_t i = 0; i < s.labels[g].size(); ++i)
        if (s.labels[g][i] == l) pooled.row(row++) = data_.groups[g].row(static_cast<long>(i));
    s.atoms[static_cast<std::size_t>(l)] = niw_sample(niw_posterior(cfg_.niw, pooled), rng);
  }
}

void GibbsEngine::update_nonroot_betas(ChainState& s, Rng& rng) const {
  int L = cfg_.L;
  for (int j : ldag_.topo) {
    if (j == ldag_.root) continue;
    int k = ldag_.layer[static_cast<std::size_t>(j)];
    const std::vector<double>& log_base =
        (k == 1) ? s.log_beta[static_cast<std::size_t>(ldag_.root)]
                 : s.log_hidden[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 2)];
    double log_aj = std::log(s.alpha[static_cast<std::size_t>(j)]);
    // Concentrations count + alpha * base, assembled in log space so a
    // degenerate base keeps its exact tail; occupied components are count
    // dominated and take the linear form. A clamped linear draw here shifts
    // the stationary law of the whole chain through the alpha conditionals.
    std::vector<double> log_params(static_cast<std::size_t>(L));
    const auto& counts = s.counts[static_cast<std::size_t>(j)];
    for (int l = 0; l < L; ++l) {
      double lab = log_aj + log_base[static_cast<std::size_t>(l)];
      int n_l = counts[static_cast<std::size_t>(l)];
      log_params[static_cast<std::size_t>(l)] =
          (n_l > 0) ? std::log(static_cast<double>(n_l) + std::exp(lab)) : lab;
    }
    auto& lb = s.log_beta[static_cast<std::size_t>(j)];
    lb = rng.dirichlet_from_log_conc(log_params);
    exp_into(lb, s.weights.beta[static_cast<std::size_t>(j)]);
  }
}

void GibbsEngine::update_root_beta(ChainState& s, SimplexKernel& kernel,
                                   Rng& rng) const {
  auto ratio = [&](const SimplexMove& move) {
    return logtarget_root_beta_ratio(s, move);
  };
  auto& lb = s.log_beta[static_cast<std::size_t>(ldag_.root)];
  kernel.sweep(lb, ratio, rng);
  exp_into(lb, s.weights.beta[static_cast<std::size_t>(ldag_.root)]);
}

void GibbsEngine::update_hidden_weights(
    ChainState& s, std::vector<std::vector<SimplexKernel>>& kernels,
    Rng& rng) const {
  for (int j : ldag_.topo) {
    if (j == ldag_.root) continue;
    int k = ldag_.layer[static_cast<std::size_t>(j)];
    for (int i = 0; i <= k - 2; ++i) {
      auto ratio = [&](const SimplexMove& move) {
        return logtarget_hidden_ratio(s, j, i, move);
      };
      auto& lh =
          s.log_hidden[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      kernels[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)].sweep(
          lh, ratio, rng);
      exp_into(lh, s.weights.hidden[static_cast<std::size_t>(j)]
                                   [static_cast<std::size_t>(i)]);
    }
  }
}

void GibbsEngine::update_alphas(ChainState& s, Rng& rng,
                                AlphaCounters* counters) const {
  double scale = cfg_.proposal.alpha_rw_scale;
  for (int j : ldag_.topo) {
    double a = s.alpha[static_cast<std::size_t>(j)];
    double a_new = a * std::exp(scale * rng.normal());
    double lr = logtarget_alpha_ratio(s, j, a_new) + std::log(a_new) - std::log(a);
    bool ok = std::isfinite(lr) && std::log(rng.uniform()) < lr;
    if (ok) s.alpha[static_cast<std::size_t>(j)] = a_new;
    if (counters) {
      ++counters->attempt[static_cast<std::size_t>(j)];
      if (ok) ++counters->accept[static_cast<std::size_t>(j)];
    }
  }
}

std::vector<SweepStep> GibbsEngine::sweep_plan() const {
  std::vector<SweepStep> plan;
  plan.push_back({StepKind::Labels, 0, 0});
  plan.push_back({StepKind::Atoms, 0, 0});
  plan.push_back({StepKind::RootBeta, ldag_.root, 0});
  for (int j : ldag_.topo) {
    if (j == ldag_.root) continue;
    int k = ldag_.layer[static_cast<std::size_t>(j)];
    for (int i = 0; i <= k - 2; ++i)
      plan.push_back({StepKind::HiddenWeights, j, i});
  }
  for (int j : ldag_.topo) plan.push_back({StepKind::Alpha, j, 0});
  for (int j : ldag_.topo)
    if (j != ldag_.root) plan.push_back({StepKind::NonRootBeta, j, 0});
  return plan;
}

ChainSamples GibbsEngine::run_chain(std::uint64_t seed) const {
  Rng rng(seed);
  ChainState s = init_state(rng);
  int n = ldag_.dag.node_count;

  SimplexKernel root_kernel(cfg_.L, cfg_.proposal.init_simplex_scale,
                            cfg_.proposal.target_accept);
  std::vector<std::vector<SimplexKernel>> hidden_kernels(
      static_cast<std::size_t>(n) + 1);
  for (int j = 1; j <= n; ++j) {
    int k = (j == ldag_.root) ? 0 : ldag_.layer[static_cast<std::size_t>(j)];
    for (int i = 0; i <= k - 2; ++i)
      hidden_kernels[static_cast<std::size_t>(j)].emplace_back(
          cfg_.L, cfg_.proposal.init_simplex_scale, cfg_.proposal.target_accept);
  }
  AlphaCounters counters;
  counters.accept.assign(static_cast<std::size_t>(n) + 1, 0);
  counters.attempt.assign(static_cast<std::size_t>(n) + 1, 0);

  auto adapt_all = [&] {
    root_kernel.adapt_from_window();
    for (auto& per_node : hidden_kernels)
      for (auto& kern : per_node) kern.adapt_from_window();
  };
  auto freeze_all = [&] {
    root_kernel.freeze();
    for (auto& per_node : hidden_kernels)
      for (auto& kern : per_node) kern.freeze();
  };

  ChainSamples out;
  out.schedule = cfg_.mcmc;
  out.schedule.seed = seed;
  out.loglik_trace.reserve(static_cast<std::size_t>(cfg_.mcmc.iterations));

  for (int it = 1; it <= cfg_.mcmc.iterations; ++it) {
    update_labels(s, rng);
    update_atoms(s, rng);
    update_root_beta(s, root_kernel, rng);
    update_hidden_weights(s, hidden_kernels, rng);
    update_alphas(s, rng, &counters);
    update_nonroot_betas(s, rng);

    if (it <= cfg_.mcmc.burnin) {
      if (it % cfg_.proposal.adapt_window == 0) adapt_all();
      if (it == cfg_.mcmc.burnin) freeze_all();
    }

    s.loglik = total_loglik(s);
    out.loglik_trace.push_back(s.loglik);
    if (it > cfg_.mcmc.burnin &&
        (it - cfg_.mcmc.burnin) % cfg_.mcmc.thinning == 0)
      out.samples.push_back(s);
  }

  out.accept.root_beta = root_kernel.overall_acceptance();
  for (int j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < hidden_kernels[static_cast<std::size_t>(j)].size(); ++i)
      out.accept.hidden.emplace_back(
          j, static_cast<int>(i),
          hidden_kernels[static_cast<std::size_t>(j)][i].overall_acceptance());
  for (int j = 1; j <= n; ++j)
    out.accept.alpha.emplace_back(
        j, counters.attempt[static_cast<std::size_t>(j)]
               ? static_cast<double>(counters.accept[static_cast<std::size_t>(j)]) /
                     static_cast<double>(counters.attempt[static_cast<std::size_t>(j)])
               : 0.0);
  return out;
}

std::vector<ChainSamples> GibbsEngine::run_chains() const {
  int c = cfg_.mcmc.chains;
  std::vector<ChainSamples> out(static_cast<std::size_t>(c));
  parallel_for(c, [&](int i) {
    out[static_cast<std::size_t>(i)] =
        run_chain(cfg_.mcmc.seed + static_cast<std::uint64_t>(i));
  });
  return out;
}

}  // namespace gdp
