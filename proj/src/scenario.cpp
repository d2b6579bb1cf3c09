#include "gdp/scenario.hpp"

#include <algorithm>

#include "gdp/error.hpp"

namespace gdp {

std::vector<std::pair<int, int>> eight_group_edges() {
  return {{1, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}, {3, 6},
          {3, 7}, {4, 5}, {4, 7}, {5, 8}, {6, 8}, {7, 8}};
}

namespace {

const char* kSizes[] = {"small", "moderate", "large", "unbalanced"};

std::vector<int> group_sizes(const std::string& size) {
  if (size == "small") return {40, 30, 30, 35, 25, 30, 25, 30};
  if (size == "moderate") return {80, 70, 70, 75, 83, 88, 92, 88};
  if (size == "large") return {150, 160, 180, 170, 155, 175, 185, 145};
  if (size == "unbalanced") return {350, 30, 40, 45, 25, 25, 35, 35};
  fail(Errc::UnknownScenario, "unknown size variant '" + size + "'");
}

std::vector<Eigen::MatrixXd> group_covariances() {
  auto cov = [](double a, double b) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, b, a;
    return m;
  };
  std::vector<Eigen::MatrixXd> covs = {cov(0.8, 0.3),  cov(0.85, 0.25),
                                       cov(1.0, 0.1),  cov(0.8, -0.1),
                                       cov(0.8, -0.2), cov(0.8, 0.0),
                                       cov(0.75, 0.25), cov(1.1, 0.1)};
  // Group 5 is the one asymmetric-diagonal case.
  covs[4](1, 1) = 0.9;
  return covs;
}

std::vector<Eigen::VectorXd> means_of(
    std::initializer_list<std::pair<double, double>> pts) {
  std::vector<Eigen::VectorXd> out;
  for (auto [x, y] : pts) {
    Eigen::VectorXd v(2);
    v << x, y;
    out.push_back(v);
  }
  return out;
}

// Family name and size variant from "<family>-<size>".
std::pair<std::string, std::string> split_name(const std::string& name) {
  auto dash = name.find('-');
  if (dash == std::string::npos)
    fail(Errc::UnknownScenario, "scenario '" + name + "' is not <family>-<size>");
  return {name.substr(0, dash), name.substr(dash + 1)};
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const char* family : {"easy", "difficult"})
    for (const char* size : kSizes)
      names.push_back(std::string(family) + "-" + size);
  return names;
}

bool is_known_scenario(const std::string& name) {
  auto names = scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ScenarioSpec scenario_spec(const std::string& name) {
  auto [family, size] = split_name(name);
  ScenarioSpec spec;
  spec.sizes = group_sizes(size);
  spec.group_covs = group_covariances();

  if (family == "easy") {
    // Four well-separated clusters; every group's weights are a fresh draw
    // from the graphical prior at truncation 4.
    spec.cluster_means = means_of({{-2, -5}, {0, 0}, {-3, 3}, {3, -3}});
    spec.weights_from_prior = true;
    spec.prior_alpha0 = 5.0;
    return spec;
  }
  if (family == "difficult") {
    // Ten overlapping clusters. Weights are fixed for the first four groups
    // (the printed decimals round these fractions); the rest average their
    // parents' rows.
    spec.cluster_means =
        means_of({{-2.5, 0}, {0, 0}, {2.5, 0}, {2.5, -2.5}, {-3, -3},
                  {2, 2}, {-2, 5}, {5, 8}, {-5, -8}, {8, -8}});
    double s6 = 1.0 / 6.0, s18 = 1.0 / 18.0;
    double s21 = 2.0 / 21.0, s7 = 1.0 / 7.0;
    double s33 = 1.0 / 33.0, s11 = 2.0 / 11.0;
    spec.fixed_weights = {
        {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1},
        {s6, s6, s6, s6, s6, s18, s18, s18, 0.0, 0.0},
        {s21, s21, s21, 0.0, 0.0, s7, s7, s7, s7, s7},
        {s33, s33, s33, s11, s11, s11, s11, s11, 0.0, 0.0},
        {}, {}, {}, {}};
    return spec;
  }
  fail(Errc::UnknownScenario, "unknown scenario family '" + family + "'");
}

GdpConfig scenario_fit_config(const std::string& name, bool paper_scale) {
  auto [family, size] = split_name(name);
  (void)size;
  GdpConfig cfg;
  cfg.niw = default_niw(2);
  if (family == "easy") {
    cfg.L = 10;
    cfg.alpha0 = 5.0;
    cfg.mcmc.iterations = paper_scale ? 15000 : 3000;
    cfg.mcmc.burnin = paper_scale ? 5000 : 1000;
    cfg.mcmc.thinning = 1;
  } else if (family == "difficult") {
    cfg.L = 20;
    cfg.alpha0 = 1.0;
    cfg.mcmc.iterations = paper_scale ? 25000 : 3000;
    cfg.mcmc.burnin = paper_scale ? 15000 : 1000;
    cfg.mcmc.thinning = paper_scale ? 5 : 1;
  } else {
    fail(Errc::UnknownScenario, "unknown scenario family '" + family + "'");
  }
  if (!is_known_scenario(name))
    fail(Errc::UnknownScenario, "unknown scenario '" + name + "'");
  return cfg;
}

}  // namespace gdp
