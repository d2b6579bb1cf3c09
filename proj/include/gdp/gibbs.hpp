#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "gdp/dag.hpp"
#include "gdp/data.hpp"
#include "gdp/model.hpp"
#include "gdp/prior.hpp"
#include "gdp/simplex.hpp"

namespace gdp {

// Full sampler state. counts[id][l] is the number of observations of node
// id's group currently assigned to component l; nodes without data (hidden
// root included) keep all-zero rows. Labels are 0-based component indices.
// log_beta and log_hidden are the canonical representation of the weight
// hierarchy: every draw and every conditional density works on log weights,
// so degenerate vectors keep exact logs even when the linear mirrors in
// weights underflow to zero. The mirrors are refreshed after each update and
// exist for serialization and summaries.
struct ChainState {
  AlphaVector alpha;
  WeightSet weights;
  std::vector<std::vector<double>> log_beta;  // [node id][component]
  // [node id][hidden level][component], levels as in WeightSet::hidden.
  std::vector<std::vector<std::vector<double>>> log_hidden;
  std::vector<std::vector<int>> labels;       // [group][obs]
  std::vector<GaussianComponent> atoms;       // exactly L, unoccupied ones too
  std::vector<std::vector<int>> counts;       // [node id][component]
  double loglik = 0.0;
};

// Rebuilds log_beta and log_hidden from the linear weights, flooring
// log(0) at Rng::kLogDrawFloor. For states assembled by hand or loaded from
// disk; the sampler keeps the representations in sync on its own.
void refresh_log_weights(ChainState& s);

struct AcceptReport {
  double root_beta = 0.0;
  // (node, hidden level, rate); level 0 is the deepest (root-anchored).
  std::vector<std::tuple<int, int, double>> hidden;
  std::vector<std::pair<int, double>> alpha;  // (node, rate)
};

struct ChainSamples {
  std::vector<ChainState> samples;   // thinned, post burn-in
  std::vector<double> loglik_trace;  // every iteration, burn-in included
  AcceptReport accept;
  McmcSchedule schedule;             // echo, with this chain's seed
};

enum class StepKind { Labels, Atoms, NonRootBeta, RootBeta, HiddenWeights, Alpha };

struct SweepStep {
  StepKind kind;
  int node = 0;   // 0 when the step is not node-specific
  int level = 0;  // hidden level for HiddenWeights steps
  bool operator==(const SweepStep&) const = default;
};

// Blocked Gibbs sampler for one dataset/DAG/config triple. Construction
// precomputes the hypernode chains and the alpha dependency lists; the
// engine itself is immutable and safe to share across chain threads.
class GibbsEngine {
 public:
  GibbsEngine(const LayeredDag& ldag, const GdpConfig& cfg,
              const GroupedDataset& data);

  ChainState init_state(Rng& rng) const;

  void update_labels(ChainState& s, Rng& rng) const;
  void update_atoms(ChainState& s, Rng& rng) const;
  void update_nonroot_betas(ChainState& s, Rng& rng) const;
  void update_root_beta(ChainState& s, SimplexKernel& kernel, Rng& rng) const;
  // kernels[j][i] drives hidden vector i of node j; levels are swept from
  // the deepest (root-anchored) vector towards the innermost one.
  void update_hidden_weights(ChainState& s,
                             std::vector<std::vector<SimplexKernel>>& kernels,
                             Rng& rng) const;
  struct AlphaCounters {
    std::vector<long> accept, attempt;  // [node id]
  };
  void update_alphas(ChainState& s, Rng& rng, AlphaCounters* counters) const;

  // Unnormalized conditional log-densities of the three MH blocks, exposed
  // so tests can pin them against independent transcriptions. All three
  // condition on the joint with every non-root weight vector integrated out:
  // those vectors enter only through Dirichlet-multinomial factors over the
  // group counts, so no conditional ever consumes a log weight that a
  // conjugate draw may have floored. The vectors themselves are redrawn
  // conjugately at the end of each sweep.
  double logtarget_root_beta(const ChainState& s,
                             const std::vector<double>& candidate) const;
  double logtarget_hidden(const ChainState& s, int node, int level,
                          const std::vector<double>& candidate) const;
  double logtarget_alpha(const ChainState& s, int node, double candidate) const;

  // Ratio forms of the same conditionals: log density at the moved (or
  // rescaled) state minus log density at the current one, with the pieces
  // that diverge as weights degenerate cancelled term by term instead of
  // being subtracted as finished totals. Deeply degenerate states push the
  // absolute log densities to magnitudes where double rounding swamps an
  // O(1) acceptance ratio, so the sampler only ever evaluates these. The
  // absolute forms above agree with them wherever both are accurate, which
  // is pinned by a test.
  double logtarget_root_beta_ratio(const ChainState& s,
                                   const SimplexMove& move) const;
  double logtarget_hidden_ratio(const ChainState& s, int node, int level,
                                const SimplexMove& move) const;
  // Ratio for replacing alpha_j = s.alpha[node] with candidate.
  double logtarget_alpha_ratio(const ChainState& s, int node,
                               double candidate) const;

  // Mixture log-likelihood of the data under the current state.
  double total_loglik(const ChainState& s) const;

  // Ordered block structure of one iteration. Non-root group weights come
  // last: the root, hidden, and alpha blocks target the marginal with those
  // vectors integrated out, so nothing may read them before the final
  // conjugate redraw restores the full state.
  std::vector<SweepStep> sweep_plan() const;

  ChainSamples run_chain(std::uint64_t seed) const;
  // config.mcmc.chains runs with seeds base+0, base+1, ...; order-stable
  // regardless of the worker pool size.
  std::vector<ChainSamples> run_chains() const;

  // counts[id] recomputed from scratch; used by consistency checks.
  std::vector<std::vector<int>> recompute_counts(const ChainState& s) const;

  const LayeredDag& ldag() const { return ldag_; }
  const GdpConfig& config() const { return cfg_; }
  const GroupedDataset& data() const { return data_; }
  int group_of_node(int id) const { return node_group_[static_cast<std::size_t>(id)]; }

 private:
  // Hidden vector i of node j has prior concentration equal to the
  // generation-(layer-1-i) ancestor alpha sum.
  double hidden_conc(const AlphaVector& alpha, int node, int level) const;

  // Forward draw of the full weight hierarchy in log space, the same cascade
  // as sample_finite_gdp but faithful in the degenerate tails. Fills the log
  // fields and their linear mirrors.
  void init_weights(ChainState& s, Rng& rng) const;

  LayeredDag ldag_;
  GdpConfig cfg_;
  GroupedDataset data_;
  std::vector<int> node_group_;  // [id] -> group index or -1
  // Column-major transposes of the group matrices so per-observation reads
  // bind as stride-1 vectors.
  std::vector<Eigen::MatrixXd> groups_t_;
  std::vector<HypernodeChain> chains_;  // [id]; empty entries for root/layer-1

  // For the alpha conditional of node j: every hidden vector whose prior
  // concentration mentions alpha_j, with its path multiplicity.
  struct ChainDep {
    int node;
    int level;
    double mult;
  };
  std::vector<std::vector<ChainDep>> alpha_chain_deps_;  // [id]
};

}  // namespace gdp
