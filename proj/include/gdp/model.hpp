#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gdp/dag.hpp"
#include "gdp/rng.hpp"

namespace gdp {

struct NiwParams {
  Eigen::VectorXd mean;         // length d
  double kappa = 0.01;          // prior pseudo-count, > 0
  Eigen::MatrixXd scale;        // d x d symmetric positive-definite
  double dof = 2.0;             // > d - 1
};

// mean 0, kappa 0.01, scale I_d, dof d.
NiwParams default_niw(int d);

// Throws ConfigMismatch on bad kappa/dof, CholeskyFailure on a non-PD scale.
void validate_niw(const NiwParams& p);

// Gaussian atom with a cached Cholesky factor of the covariance. Only the
// lower triangle of the covariance argument is read.
class GaussianComponent {
 public:
  GaussianComponent(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::MatrixXd& chol_lower() const { return chol_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  double loglik(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;  // lower triangular, chol_ * chol_^T = cov_
  double logdet_ = 0.0;
};

double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GaussianComponent& comp);

// Conjugate update; rows of data are observations. Empty data returns the
// prior unchanged.
NiwParams niw_posterior(const NiwParams& prior,
                        const Eigen::Ref<const Eigen::MatrixXd>& data);

// covariance ~ inverse-Wishart(scale, dof), mean ~ N(mean, covariance/kappa).
GaussianComponent niw_sample(const NiwParams& params, Rng& rng);

// Per-node concentrations, indexed by node id (slot 0 unused).
using AlphaVector = std::vector<double>;

// Records which alpha entries the draw for each node consumed.
struct AlphaAccessLog {
  std::vector<std::pair<int, int>> reads;  // (node being drawn, node read)
};

// Root alpha ~ Gamma(alpha0, 1); every other node ~ Gamma(sum of its
// parents' alphas, 1), drawn in topological order.
AlphaVector sample_alphas(const LayeredDag& ldag, double alpha0, Rng& rng,
                          AlphaAccessLog* log = nullptr);

struct McmcSchedule {
  int iterations = 3000;
  int burnin = 1000;
  int thinning = 1;
  int chains = 1;
  std::uint64_t seed = 1;
};

struct ProposalConfig {
  double init_simplex_scale = 0.5;  // initial per-coordinate logit step sd
  double target_accept = 0.3;
  double alpha_rw_scale = 0.25;     // log-scale random walk sd for alphas
  int adapt_window = 50;            // sweeps between adaptation updates
};

struct GdpConfig {
  int L = 10;
  double alpha0 = 5.0;
  NiwParams niw;
  McmcSchedule mcmc;
  ProposalConfig proposal;
};

// ConfigMismatch on violations: L >= 2, alpha0 > 0, burnin < iterations,
// thinning >= 1, chains >= 1, target acceptance in (0,1), valid NIW.
void validate_config(const GdpConfig& cfg);

}  // namespace gdp
