#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gdp/dag.hpp"
#include "gdp/data.hpp"
#include "gdp/model.hpp"
#include "gdp/rng.hpp"

namespace gdp {

// Weight vectors of the truncated model. beta[id] is node id's mixture
// weights over the L shared components. hidden[id] is node id's chain of
// hidden simplexes, index 0 the deepest (the one drawn against the root
// weights, concentration = generation-(layer-1) ancestor sum) up to index
// layer-2, the innermost one that β_id is drawn against. parent_mix[id] is
// only populated by the explicit-mixture construction: a simplex over the
// node's sorted parents.
struct WeightSet {
  int L = 0;
  std::vector<std::vector<double>> beta;
  std::vector<std::vector<std::vector<double>>> hidden;
  std::vector<std::vector<double>> parent_mix;
};

// Verifies simplex sums (1e-12) and hidden chain lengths against the DAG.
void check_weight_set(const WeightSet& w, const LayeredDag& ldag);

// Truncated stick-breaking; the last fraction is 1 so weights sum exactly.
std::vector<double> stick_break(double alpha, int L, Rng& rng);

// Top-down draw of the full weight hierarchy: root beta ~ Dir(alpha_root/L
// ... ), every deeper node descends through its hidden chain, layer-1 nodes
// draw beta directly against the root weights.
WeightSet sample_finite_gdp(const LayeredDag& ldag, const AlphaVector& alpha,
                            int L, Rng& rng);

// The direct construction used as the equivalence oracle: each node mixes
// its parents' beta vectors with parent_mix ~ Dir(parent alphas) and draws
// beta against that mixed base. Marginal moments of every beta must match
// sample_finite_gdp.
WeightSet sample_explicit_mixture_gdp(const LayeredDag& ldag,
                                      const AlphaVector& alpha, int L,
                                      Rng& rng);

// One seating level: a plain Chinese restaurant. count is customers at the
// table; dish is the atom label the table resolved to.
struct RestaurantTable {
  int count = 0;
  int dish = -1;
};

struct RestaurantLevel {
  std::vector<RestaurantTable> tables;
  int customers = 0;
};

// Full seating record. restaurant[id] is node id's base restaurant (for the
// root node this is the shared top-level restaurant where dishes are
// minted); hyper[id][h] are node id's hyper-restaurant levels, h = 0 the
// parent-generation level, escalating towards the root.
struct RestaurantState {
  std::vector<RestaurantLevel> restaurant;
  std::vector<std::vector<RestaurantLevel>> hyper;
  int dish_count = 0;
  std::vector<std::vector<int>> customer_dish;   // [id][customer]
  std::vector<std::vector<int>> customer_table;  // [id][customer]
};

// Sequential predictive seating. sizes is indexed by node id (slot 0
// unused); nodes are processed in layer-major topological order.
RestaurantState restaurant_sim(const LayeredDag& ldag,
                               const AlphaVector& alpha,
                               const std::vector<int>& sizes, Rng& rng);

// Empirical vs analytic moments of the Dirichlet mixture identity: with
// X_i ~ Dir(a_i) independent and pi ~ Dir(a_1., ..., a_n.), the mixture
// sum_i pi_i X_i is Dir(sum_i a_i) distributed.
struct MomentReport {
  long draws = 0;
  std::vector<double> empirical_mean, empirical_var;
  std::vector<double> analytic_mean, analytic_var;
  std::vector<double> se_mean, se_var;
  double max_mean_z = 0.0;  // max_l |emp - analytic| / se over means
  double max_var_z = 0.0;   // same over variances
};

MomentReport lemma_mixture_oracle(
    const std::vector<std::vector<double>>& alpha_vectors, long n_draws,
    Rng& rng);

// Synthetic-data recipe. Groups align with the data-carrying (non-hidden)
// nodes of the DAG in ascending node-id order. fixed_weights rows may be
// empty; an empty row means the group's weights are the arithmetic mean of
// its DAG parents' weight rows (parents must resolve first in layer order).
// weights_from_prior draws every group's weights via sample_finite_gdp
// instead, with truncation = cluster count and the given alpha0.
struct ScenarioSpec {
  std::vector<Eigen::VectorXd> cluster_means;
  std::vector<Eigen::MatrixXd> group_covs;  // per group
  std::vector<int> sizes;                   // per group
  std::vector<std::vector<double>> fixed_weights;
  bool weights_from_prior = false;
  double prior_alpha0 = 5.0;
};

struct SyntheticData {
  GroupedDataset data;  // with true_labels filled
  std::vector<std::vector<double>> weights;  // realized per-group weights
};

SyntheticData generate_synthetic(const LayeredDag& ldag,
                                 const ScenarioSpec& spec, Rng& rng);

}  // namespace gdp
