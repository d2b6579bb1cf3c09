#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "gdp/error.hpp"
#include "gdp/mathutil.hpp"
#include "gdp/rng.hpp"
#include "gdp/simplex.hpp"

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

std::vector<double> log_state(const std::vector<double>& x) {
  std::vector<double> lx(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) lx[l] = std::log(x[l]);
  return lx;
}

// A valid kernel state: finite log weights whose exponentials sum to one.
bool on_log_simplex(const std::vector<double>& lx) {
  double s = 0.0;
  for (double v : lx) {
    if (!std::isfinite(v) || v > 1e-9) return false;
    s += std::exp(v);
  }
  return std::abs(s - 1.0) < 1e-9;
}

// Burn in with periodic adaptation, freeze, then return per-coordinate chain
// averages of the linear weights and the post-freeze acceptance rate.
struct StationaryRun {
  std::vector<double> mean;
  std::vector<double> se;
  double acceptance = 0.0;
};

StationaryRun run_to_stationarity(SimplexKernel& kernel,
                                  const SimplexKernel::LogTargetRatio& target,
                                  std::vector<double> lx, int burn_sweeps,
                                  int keep_sweeps, Rng& rng) {
  for (int t = 1; t <= burn_sweeps; ++t) {
    kernel.sweep(lx, target, rng);
    if (t % 50 == 0) kernel.adapt_from_window();
  }
  kernel.freeze();
  kernel.reset_window();

  std::size_t dim = lx.size();
  std::vector<std::vector<double>> trace(dim);
  long accepted = 0;
  for (int t = 0; t < keep_sweeps; ++t) {
    accepted += kernel.sweep(lx, target, rng);
    for (std::size_t l = 0; l < dim; ++l) trace[l].push_back(std::exp(lx[l]));
  }
  StationaryRun out;
  for (std::size_t l = 0; l < dim; ++l) {
    out.mean.push_back(mean_of(trace[l]));
    out.se.push_back(batch_se(trace[l]));
  }
  out.acceptance =
      static_cast<double>(accepted) / (static_cast<double>(keep_sweeps) * dim);
  return out;
}

// Dirichlet log density ratio of a move, constants dropped: the density is
// linear in the log weights, so the ratio is the weighted sum of the move's
// exact per-coordinate increments.
SimplexKernel::LogTargetRatio dirichlet_target(std::vector<double> conc) {
  return [conc](const SimplexMove& m) {
    double lp = 0.0;
    for (std::size_t l = 0; l < conc.size(); ++l)
      lp += (conc[l] - 1.0) * m.delta(l);
    return lp;
  };
}

}  // namespace

TEST_CASE("chain reaches the dirichlet(3,4,5) stationary means") {
  auto target = dirichlet_target({3.0, 4.0, 5.0});
  SimplexKernel kernel(3);
  Rng rng(314159u);
  StationaryRun run = run_to_stationarity(kernel, target,
                                          log_state({0.4, 0.3, 0.3}), 1500,
                                          30000, rng);
  std::vector<double> want = {3.0 / 12.0, 4.0 / 12.0, 5.0 / 12.0};
  for (std::size_t l = 0; l < 3; ++l)
    CHECK(std::abs(run.mean[l] - want[l]) < 4.0 * run.se[l]);
  CHECK(run.acceptance > 0.15);
  CHECK(run.acceptance < 0.55);
}

// A flat target leaves the uniform distribution invariant only if the
// proposal Jacobian is carried correctly, so the uniform means are a direct
// check on the acceptance-ratio algebra.
TEST_CASE("flat target gives uniform coordinate means") {
  auto target = [](const SimplexMove&) { return 0.0; };
  SimplexKernel kernel(4);
  Rng rng(2718u);
  StationaryRun run = run_to_stationarity(kernel, target,
                                          log_state({0.7, 0.1, 0.1, 0.1}),
                                          1500, 30000, rng);
  for (std::size_t l = 0; l < 4; ++l)
    CHECK(std::abs(run.mean[l] - 0.25) < 4.0 * run.se[l]);
}

// Replicate invariance at a concentration so small that the stationary log
// weight sits thousands of nats below linear underflow. Each replicate
// starts from an exact Dirichlet draw, so after any number of sweeps the
// state is still exactly Dirichlet if and only if the kernel leaves the
// target invariant; the mean log weight then has to match its digamma value,
// which a state floored anywhere above log(1e-300) would miss by a mile.
TEST_CASE("kernel holds a dirichlet with log weights near -2000 invariant") {
  const double c = 5e-4;
  std::vector<double> conc = {c, 1.0};
  auto target = dirichlet_target(conc);
  // digamma(c) - digamma(1 + c) via the small-argument expansion
  // digamma(x) = -1/x - EulerGamma + (pi^2/6) x + O(x^2).
  const double pi2_6 = 1.6449340668482264;
  double want = (-1.0 / c - kEulerGamma + pi2_6 * c) -
                (-kEulerGamma + pi2_6 * c);
  Rng rng(424242u);
  const int reps = 400;
  const int sweeps = 40;
  std::vector<double> last(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    SimplexKernel kernel(2, 2.0);
    kernel.freeze();
    std::vector<double> lx = rng.dirichlet_log(conc);
    for (int t = 0; t < sweeps; ++t) kernel.sweep(lx, target, rng);
    REQUIRE(on_log_simplex(lx));
    last[static_cast<std::size_t>(r)] = lx[0];
  }
  double m = mean_of(last);
  CHECK(m < -1000.0);
  CHECK(std::abs(m - want) < 4.0 * iid_se(last));
}

TEST_CASE("adaptation direction follows the window rates") {
  SimplexKernel kernel(3, 0.5, 0.3);
  std::vector<double> before = kernel.log_scales();
  kernel.adapt({1.0, 1.0, 1.0});
  std::vector<double> up = kernel.log_scales();
  for (std::size_t l = 0; l < 3; ++l) CHECK(up[l] > before[l]);
  kernel.adapt({0.0, 0.0, 0.0});
  kernel.adapt({0.0, 0.0, 0.0});
  std::vector<double> down = kernel.log_scales();
  for (std::size_t l = 0; l < 3; ++l) CHECK(down[l] < up[l]);
}

TEST_CASE("freezing stops adaptation but not sampling") {
  SimplexKernel kernel(3);
  Rng rng(10u);
  auto target = [](const SimplexMove&) { return 0.0; };
  std::vector<double> lx = log_state({0.3, 0.3, 0.4});
  for (int t = 0; t < 120; ++t) kernel.sweep(lx, target, rng);
  kernel.adapt_from_window();
  kernel.freeze();
  CHECK(kernel.frozen());
  CHECK(fails_with(Errc::AdaptAfterFreeze, [&] { kernel.adapt({0.3, 0.3, 0.3}); }));
  CHECK(fails_with(Errc::AdaptAfterFreeze, [&] { kernel.adapt_from_window(); }));
  std::vector<double> scales = kernel.log_scales();
  for (int t = 0; t < 50; ++t) kernel.sweep(lx, target, rng);
  CHECK(kernel.log_scales() == scales);
  CHECK(on_log_simplex(lx));
}

TEST_CASE("steps keep the state a valid log simplex from a corner start") {
  auto target = dirichlet_target({0.5, 0.5, 8.0});
  SimplexKernel kernel(3, 2.0);
  Rng rng(77u);
  std::vector<double> lx = {std::log1p(-2e-12), std::log(1e-12),
                            std::log(1e-12)};
  for (int t = 0; t < 2000; ++t) {
    kernel.sweep(lx, target, rng);
    REQUIRE(on_log_simplex(lx));
  }
}

// On healthy states the exact move increments must agree with subtracting
// the assembled proposal coordinates from the current ones; the two routes
// only part ways in the degenerate tails, where at() saturates and delta()
// stays exact.
TEST_CASE("move deltas match the assembled proposal on healthy states") {
  std::vector<double> conc = {2.5, 1.0, 4.0};
  int seen = 0;
  auto probe = [&](const SimplexMove& m) {
    double via_delta = 0.0;
    double via_state = 0.0;
    for (std::size_t l = 0; l < conc.size(); ++l) {
      via_delta += (conc[l] - 1.0) * m.delta(l);
      via_state += (conc[l] - 1.0) * (m.at(l) - m.cur[l]);
    }
    CHECK(std::abs(via_delta - via_state) < 1e-9);
    ++seen;
    return via_delta;
  };
  SimplexKernel kernel(3);
  Rng rng(31u);
  std::vector<double> lx = log_state({0.2, 0.5, 0.3});
  for (int t = 0; t < 200; ++t) kernel.sweep(lx, probe, rng);
  CHECK(seen == 600);
}

TEST_CASE("a target whose ratio is never finite rejects every proposal") {
  auto target = [](const SimplexMove&) {
    return -std::numeric_limits<double>::infinity();
  };
  SimplexKernel kernel(3);
  Rng rng(5u);
  std::vector<double> lx = log_state({0.2, 0.3, 0.5});
  std::vector<double> start = lx;
  int accepted = 0;
  for (int t = 0; t < 100; ++t) accepted += kernel.sweep(lx, target, rng);
  CHECK(accepted == 0);
  CHECK(lx == start);
  CHECK(kernel.overall_acceptance() == 0.0);
}

TEST_CASE("identical seeds give identical trajectories") {
  auto target = dirichlet_target({2.0, 3.0, 4.0});
  SimplexKernel k1(3), k2(3);
  Rng r1(123u), r2(123u);
  std::vector<double> x1 = log_state({0.3, 0.3, 0.4});
  std::vector<double> x2 = x1;
  for (int t = 0; t < 500; ++t) {
    k1.sweep(x1, target, r1);
    k2.sweep(x2, target, r2);
    REQUIRE(x1 == x2);
  }
  CHECK(k1.window_rates() == k2.window_rates());
}

TEST_CASE("single steps report acceptance and advance the cycle") {
  auto target = dirichlet_target({3.0, 3.0});
  SimplexKernel kernel(2);
  Rng rng(9u);
  std::vector<double> lx = log_state({0.5, 0.5});
  int accepted = 0;
  for (int t = 0; t < 400; ++t) {
    auto [next, ok] = kernel.propose_and_step(lx, target, rng);
    if (ok) {
      CHECK(next != lx);
      ++accepted;
    } else {
      CHECK(next == lx);
    }
    lx = next;
    REQUIRE(on_log_simplex(lx));
  }
  CHECK(accepted > 0);
  CHECK(accepted < 400);
  std::vector<double> rates = kernel.window_rates();
  REQUIRE(rates.size() == 2);
  double overall = kernel.overall_acceptance();
  CHECK(overall == doctest::Approx(accepted / 400.0));
  // An empty window reports the target rate so adapting on it is a no-op.
  kernel.reset_window();
  for (double r : kernel.window_rates()) CHECK(r == kernel.target_accept());
}
