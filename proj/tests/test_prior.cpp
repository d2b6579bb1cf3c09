#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "gdp/dag.hpp"
#include "gdp/error.hpp"
#include "gdp/mathutil.hpp"
#include "gdp/prior.hpp"
#include "gdp/scenario.hpp"

using namespace gdp;

namespace {

template <typename Fn>
bool fails_with(Errc expected, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == expected;
  }
  return false;
}

LayeredDag fig6() { return layered_from_edges(8, eight_group_edges()); }

struct MomentTrack {
  std::vector<double> s1, s2;
  long n = 0;

  explicit MomentTrack(std::size_t dim) : s1(dim, 0.0), s2(dim, 0.0) {}

  void add(const std::vector<double>& x) {
    for (std::size_t l = 0; l < x.size(); ++l) {
      s1[l] += x[l];
      s2[l] += x[l] * x[l];
    }
    ++n;
  }

  double mean(std::size_t l) const { return s1[l] / static_cast<double>(n); }
  double var(std::size_t l) const {
    double m = mean(l);
    return s2[l] / static_cast<double>(n) - m * m;
  }
  double se_mean(std::size_t l) const {
    return std::sqrt(var(l) / static_cast<double>(n));
  }
};

}  // namespace

TEST_CASE("stick breaking sums to one and has geometric size decay") {
  Rng rng(17u);
  double alpha = 2.0;
  int L = 15;
  MomentTrack track(static_cast<std::size_t>(L));
  for (int t = 0; t < 20000; ++t) {
    std::vector<double> w = stick_break(alpha, L, rng);
    REQUIRE(static_cast<int>(w.size()) == L);
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : w) REQUIRE(v >= 0.0);
    track.add(w);
  }
  // E[w_l] = (alpha/(1+alpha))^l / (1+alpha) for the non-terminal sticks.
  for (std::size_t l = 0; l < 5; ++l) {
    double want = std::pow(alpha / (1.0 + alpha), static_cast<double>(l)) /
                  (1.0 + alpha);
    CHECK(std::abs(track.mean(l) - want) < 4.0 * track.se_mean(l));
  }
  CHECK(fails_with(Errc::ConfigMismatch, [&] { stick_break(1.0, 0, rng); }));
  CHECK(fails_with(Errc::ZeroConcentration, [&] { stick_break(0.0, 3, rng); }));
}

TEST_CASE("dirichlet mixture of dirichlets collapses to a single dirichlet") {
  Rng rng(90210u);

  SUBCASE("two vectors merging to (4,6)") {
    MomentReport rep = lemma_mixture_oracle({{1.0, 2.0}, {3.0, 4.0}}, 30000, rng);
    CHECK(rep.analytic_mean[0] == doctest::Approx(0.4));
    CHECK(rep.analytic_mean[1] == doctest::Approx(0.6));
    CHECK(rep.analytic_var[0] == doctest::Approx(0.4 * 0.6 / 11.0));
    CHECK(rep.max_mean_z < 4.0);
    CHECK(rep.max_var_z < 4.0);
  }

  SUBCASE("one vector is the identity case") {
    MomentReport rep = lemma_mixture_oracle({{2.0, 3.0, 5.0}}, 20000, rng);
    CHECK(rep.max_mean_z < 4.0);
    CHECK(rep.max_var_z < 4.0);
  }

  SUBCASE("three uneven vectors") {
    MomentReport rep = lemma_mixture_oracle(
        {{0.5, 1.5, 1.0}, {2.0, 2.0, 2.0}, {4.0, 0.5, 0.5}}, 30000, rng);
    for (std::size_t l = 0; l < 3; ++l) {
      double total = 0.5 + 2.0 + 4.0 + 1.5 + 2.0 + 0.5 + 1.0 + 2.0 + 0.5;
      (void)total;
      CHECK(rep.analytic_mean[l] ==
            doctest::Approx((l == 0 ? 6.5 : l == 1 ? 4.0 : 3.5) / 14.0));
    }
    CHECK(rep.max_mean_z < 4.0);
    CHECK(rep.max_var_z < 4.0);
  }

  SUBCASE("input validation") {
    CHECK(fails_with(Errc::ConfigMismatch,
                     [&] { lemma_mixture_oracle({}, 10, rng); }));
    CHECK(fails_with(Errc::LengthMismatch, [&] {
      lemma_mixture_oracle({{1.0, 2.0}, {1.0, 2.0, 3.0}}, 10, rng);
    }));
    CHECK(fails_with(Errc::ZeroConcentration, [&] {
      lemma_mixture_oracle({{1.0, 0.0}}, 10, rng);
    }));
  }
}

// The hidden-chain construction and the explicit parent-mixture construction
// must give the same joint law for the group weights. Means, variances, and
// the cross moment with the root weights are compared per component on the
// deep nodes, where the two recursions genuinely differ.
TEST_CASE("chained and explicit weight constructions agree in distribution") {
  LayeredDag ldag = fig6();
  AlphaVector alpha(9, 2.0);
  alpha[0] = 0.0;
  int L = 4;
  long n = 20000;

  std::vector<int> deep = {5, 6, 7, 8};
  std::map<int, MomentTrack> chain_beta, explicit_beta;
  std::map<int, MomentTrack> chain_cross, explicit_cross;
  for (int j : deep) {
    chain_beta.emplace(j, MomentTrack(static_cast<std::size_t>(L)));
    explicit_beta.emplace(j, MomentTrack(static_cast<std::size_t>(L)));
    chain_cross.emplace(j, MomentTrack(static_cast<std::size_t>(L)));
    explicit_cross.emplace(j, MomentTrack(static_cast<std::size_t>(L)));
  }

  Rng rng_chain(60601u), rng_explicit(60602u);
  std::vector<double> prod(static_cast<std::size_t>(L));
  for (long t = 0; t < n; ++t) {
    WeightSet a = sample_finite_gdp(ldag, alpha, L, rng_chain);
    WeightSet b = sample_explicit_mixture_gdp(ldag, alpha, L, rng_explicit);
    for (int j : deep) {
      chain_beta.at(j).add(a.beta[static_cast<std::size_t>(j)]);
      explicit_beta.at(j).add(b.beta[static_cast<std::size_t>(j)]);
      for (int l = 0; l < L; ++l)
        prod[static_cast<std::size_t>(l)] =
            a.beta[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] *
            a.beta[1][static_cast<std::size_t>(l)];
      chain_cross.at(j).add(prod);
      for (int l = 0; l < L; ++l)
        prod[static_cast<std::size_t>(l)] =
            b.beta[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] *
            b.beta[1][static_cast<std::size_t>(l)];
      explicit_cross.at(j).add(prod);
    }
  }

  auto two_sample_close = [](const MomentTrack& x, const MomentTrack& y,
                             std::size_t l) {
    double se = std::sqrt(x.se_mean(l) * x.se_mean(l) +
                          y.se_mean(l) * y.se_mean(l));
    return std::abs(x.mean(l) - y.mean(l)) < 4.0 * se;
  };
  for (int j : deep)
    for (std::size_t l = 0; l < static_cast<std::size_t>(L); ++l) {
      CHECK(two_sample_close(chain_beta.at(j), explicit_beta.at(j), l));
      CHECK(two_sample_close(chain_cross.at(j), explicit_cross.at(j), l));
      // Variances via a normal-theory z on the second moments.
      double dv = std::abs(chain_beta.at(j).var(l) - explicit_beta.at(j).var(l));
      CHECK(dv < 0.01);
    }
}

TEST_CASE("sampled weight sets have the layered chain shape") {
  LayeredDag ldag = fig6();
  Rng rng(33u);
  AlphaVector alpha = sample_alphas(ldag, 5.0, rng);
  WeightSet w = sample_finite_gdp(ldag, alpha, 6, rng);
  CHECK_NOTHROW(check_weight_set(w, ldag));
  CHECK(w.hidden[1].empty());
  CHECK(w.hidden[2].empty());
  CHECK(w.hidden[5].size() == 1);
  CHECK(w.hidden[6].size() == 1);
  CHECK(w.hidden[7].size() == 1);
  CHECK(w.hidden[8].size() == 2);

  WeightSet tampered = w;
  tampered.beta[3][0] += 0.25;
  CHECK(fails_with(Errc::ConfigMismatch,
                   [&] { check_weight_set(tampered, ldag); }));
  tampered = w;
  tampered.hidden[8].pop_back();
  CHECK(fails_with(Errc::LengthMismatch,
                   [&] { check_weight_set(tampered, ldag); }));

  WeightSet e = sample_explicit_mixture_gdp(ldag, alpha, 6, rng);
  CHECK(e.parent_mix[8].size() == 3);
  CHECK(std::accumulate(e.parent_mix[8].begin(), e.parent_mix[8].end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single restaurant matches the exact table-count mean") {
  std::vector<std::pair<int, int>> no_edges;
  LayeredDag single = layered_from_edges(1, no_edges);
  AlphaVector alpha = {0.0, 1.5};
  std::vector<int> sizes = {0, 40};

  int sims = 20000;
  Rng rng(404u);
  std::vector<double> tables;
  tables.reserve(static_cast<std::size_t>(sims));
  for (int s = 0; s < sims; ++s) {
    RestaurantState st = restaurant_sim(single, alpha, sizes, rng);
    CHECK(st.restaurant[1].customers == 40);
    CHECK(static_cast<int>(st.customer_dish[1].size()) == 40);
    tables.push_back(static_cast<double>(st.restaurant[1].tables.size()));
    CHECK(st.dish_count == static_cast<int>(st.restaurant[1].tables.size()));
  }
  double want = 0.0;
  for (int i = 1; i <= 40; ++i) want += 1.5 / (1.5 + i - 1.0);
  CHECK(std::abs(mean_of(tables) - want) < 4.0 * iid_se(tables));
}

TEST_CASE("seating of three customers matches the exact partition law") {
  std::vector<std::pair<int, int>> no_edges;
  LayeredDag single = layered_from_edges(1, no_edges);
  double a = 1.0;
  AlphaVector alpha = {0.0, a};
  std::vector<int> sizes = {0, 3};

  // Patterns keyed by normalized dish labels of the three customers.
  std::map<std::array<int, 3>, double> freq;
  int sims = 30000;
  Rng rng(808u);
  for (int s = 0; s < sims; ++s) {
    RestaurantState st = restaurant_sim(single, alpha, sizes, rng);
    const auto& d = st.customer_dish[1];
    std::array<int, 3> key{};
    std::map<int, int> relabel;
    for (int i = 0; i < 3; ++i) {
      auto [it, fresh] = relabel.emplace(d[static_cast<std::size_t>(i)],
                                         static_cast<int>(relabel.size()));
      key[static_cast<std::size_t>(i)] = it->second;
      (void)fresh;
    }
    freq[key] += 1.0 / sims;
  }
  double denom = (1.0 + a) * (2.0 + a);
  std::map<std::array<int, 3>, double> exact = {
      {{0, 0, 0}, 2.0 / denom},  {{0, 0, 1}, a / denom},
      {{0, 1, 0}, a / denom},    {{0, 1, 1}, a / denom},
      {{0, 1, 2}, a * a / denom}};
  double tv = 0.0;
  for (const auto& [key, p] : exact) tv += std::abs(freq[key] - p);
  CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("two-level sharing probability matches the nested seating law") {
  std::vector<std::pair<int, int>> edges = {{1, 2}};
  LayeredDag chain = layered_from_edges(2, edges);
  AlphaVector alpha = {0.0, 1.0, 1.0};
  std::vector<int> sizes = {0, 0, 2};

  // Second customer shares a dish by joining the first table, or by opening
  // a table whose request joins the single root table: 1/2 + 1/2 * 1/2.
  int sims = 20000;
  int shared = 0;
  Rng rng(5150u);
  for (int s = 0; s < sims; ++s) {
    RestaurantState st = restaurant_sim(chain, alpha, sizes, rng);
    if (st.customer_dish[2][0] == st.customer_dish[2][1]) ++shared;
  }
  double p = static_cast<double>(shared) / sims;
  double se = std::sqrt(0.75 * 0.25 / sims);
  CHECK(std::abs(p - 0.75) < 4.0 * se);
}

TEST_CASE("a lone deep customer cascades one request through every level") {
  LayeredDag ldag = fig6();
  AlphaVector alpha(9, 1.0);
  alpha[0] = 0.0;
  std::vector<int> sizes(9, 0);
  sizes[8] = 1;
  Rng rng(1u);
  RestaurantState st = restaurant_sim(ldag, alpha, sizes, rng);
  CHECK(st.dish_count == 1);
  CHECK(st.restaurant[8].customers == 1);
  CHECK(st.hyper[8].size() == 2);
  CHECK(st.hyper[8][0].customers == 1);
  CHECK(st.hyper[8][1].customers == 1);
  CHECK(st.restaurant[1].customers == 1);
  CHECK(st.customer_dish[8] == std::vector<int>{0});

  CHECK(fails_with(Errc::LengthMismatch, [&] {
    restaurant_sim(ldag, alpha, {0, 1, 1}, rng);
  }));
}

TEST_CASE("synthetic groups inherit averaged parent weights") {
  LayeredDag ldag = fig6();
  ScenarioSpec spec;
  spec.cluster_means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(10.0, 10.0)};
  spec.group_covs.assign(8, Eigen::Matrix2d::Identity());
  spec.sizes.assign(8, 25);
  spec.sizes[0] = 600;
  spec.fixed_weights = {{0.9, 0.1}, {0.5, 0.5}, {0.2, 0.8}, {1.0, 0.0},
                        {},         {},         {},         {}};

  Rng rng(246u);
  SyntheticData syn = generate_synthetic(ldag, spec, rng);
  CHECK(syn.data.dim == 2);
  CHECK(syn.data.group_count() == 8);
  CHECK(syn.data.group_node == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(syn.data.has_truth());

  // Node 5 averages nodes 2 and 4; node 8 averages nodes 5, 6, 7.
  CHECK(syn.weights[4][0] == doctest::Approx(0.5 * (0.5 + 1.0)));
  CHECK(syn.weights[5][0] == doctest::Approx(0.5 * (0.5 + 0.2)));
  CHECK(syn.weights[6][0] == doctest::Approx(0.5 * (0.2 + 1.0)));
  CHECK(syn.weights[7][0] ==
        doctest::Approx((syn.weights[4][0] + syn.weights[5][0] +
                         syn.weights[6][0]) /
                        3.0));

  // Group 1 is large enough to check the component emission directly.
  const auto& g0 = syn.data.groups[0];
  const auto& z0 = syn.data.true_labels[0];
  Eigen::Vector2d sum0 = Eigen::Vector2d::Zero();
  int n0 = 0;
  for (int i = 0; i < g0.rows(); ++i) {
    REQUIRE(z0[static_cast<std::size_t>(i)] >= 0);
    REQUIRE(z0[static_cast<std::size_t>(i)] < 2);
    if (z0[static_cast<std::size_t>(i)] == 1) {
      sum0 += g0.row(i).transpose();
      ++n0;
    }
  }
  REQUIRE(n0 > 20);
  Eigen::Vector2d m = sum0 / n0;
  double se = 1.0 / std::sqrt(static_cast<double>(n0));
  CHECK(std::abs(m(0) - 10.0) < 4.0 * se);
  CHECK(std::abs(m(1) - 10.0) < 4.0 * se);
}

TEST_CASE("synthetic options cover prior weights and tight covariances") {
  LayeredDag ldag = fig6();
  ScenarioSpec spec;
  spec.cluster_means = {Eigen::Vector2d(-2.0, -5.0), Eigen::Vector2d(3.0, -3.0),
                        Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(-3.0, 3.0)};
  spec.group_covs.assign(8, 1e-8 * Eigen::Matrix2d::Identity());
  spec.sizes.assign(8, 12);
  spec.weights_from_prior = true;
  spec.prior_alpha0 = 5.0;

  Rng rng(777u);
  SyntheticData syn = generate_synthetic(ldag, spec, rng);
  for (const auto& w : syn.weights) {
    REQUIRE(w.size() == 4);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  // A near-zero covariance pins every point onto its cluster mean.
  for (std::size_t g = 0; g < 8; ++g)
    for (int i = 0; i < syn.data.groups[g].rows(); ++i) {
      int z = syn.data.true_labels[g][static_cast<std::size_t>(i)];
      Eigen::Vector2d gap = syn.data.groups[g].row(i).transpose() -
                            spec.cluster_means[static_cast<std::size_t>(z)];
      CHECK(gap.norm() < 1e-3);
    }
}

TEST_CASE("synthetic generation rejects malformed scenarios") {
  LayeredDag ldag = fig6();
  ScenarioSpec spec;
  spec.cluster_means = {Eigen::Vector2d(0.0, 0.0)};
  spec.group_covs.assign(8, Eigen::Matrix2d::Identity());
  spec.sizes.assign(7, 10);
  Rng rng(3u);
  CHECK(fails_with(Errc::ConfigMismatch,
                   [&] { generate_synthetic(ldag, spec, rng); }));

  spec.sizes.assign(8, 10);
  spec.fixed_weights.assign(8, std::vector<double>{});
  CHECK(fails_with(Errc::ConfigMismatch,
                   [&] { generate_synthetic(ldag, spec, rng); }));

  spec.fixed_weights.assign(8, std::vector<double>{1.0});
  spec.cluster_means.clear();
  CHECK(fails_with(Errc::ConfigMismatch,
                   [&] { generate_synthetic(ldag, spec, rng); }));
}
