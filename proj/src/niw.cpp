#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "gdp/error.hpp"
#include "gdp/model.hpp"

namespace gdp {

NiwParams default_niw(int d) {
  NiwParams p;
  p.mean = Eigen::VectorXd::Zero(d);
  p.kappa = 0.01;
  p.scale = Eigen::MatrixXd::Identity(d, d);
  p.dof = static_cast<double>(d);
  return p;
}

void validate_niw(const NiwParams& p) {
  int d = static_cast<int>(p.mean.size());
  if (d < 1 || p.scale.rows() != d || p.scale.cols() != d)
    fail(Errc::DimensionMismatch, "NIW mean/scale dimensions disagree");
  if (!(p.kappa > 0.0))
    fail(Errc::ConfigMismatch, "NIW kappa must be positive");
  if (!(p.dof > static_cast<double>(d) - 1.0))
    fail(Errc::ConfigMismatch, "NIW dof must exceed d - 1");
  Eigen::LLT<Eigen::MatrixXd> llt(p.scale);
  if (llt.info() != Eigen::Success)
    fail(Errc::CholeskyFailure, "NIW scale matrix is not positive-definite");
}

GaussianComponent::GaussianComponent(Eigen::VectorXd mean,
                                     const Eigen::MatrixXd& covariance)
    : mean_(std::move(mean)), cov_(covariance) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    fail(Errc::DimensionMismatch, "covariance does not match mean dimension");
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    fail(Errc::CholeskyFailure, "covariance is not positive-definite");
  chol_ = llt.matrixL();
  logdet_ = 0.0;
  for (int i = 0; i < chol_.rows(); ++i) logdet_ += 2.0 * std::log(chol_(i, i));
}

double GaussianComponent::loglik(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mean_.size())
    fail(Errc::DimensionMismatch, "point does not match component dimension");
  Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
  double d = static_cast<double>(mean_.size());
  return -0.5 * (d * std::log(2.0 * M_PI) + logdet_ + z.squaredNorm());
}

double gaussian_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const GaussianComponent& comp) {
  return comp.loglik(x);
}

NiwParams niw_posterior(const NiwParams& prior,
                        const Eigen::Ref<const Eigen::MatrixXd>& data) {
  int d = static_cast<int>(prior.mean.size());
  long n = data.rows();
  if (n == 0) return prior;
  if (data.cols() != d)
    fail(Errc::DimensionMismatch, "data has " + std::to_string(data.cols()) +
                                      " columns, prior expects " +
                                      std::to_string(d));
  double dn = static_cast<double>(n);
  Eigen::VectorXd xbar = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - xbar.transpose();
  Eigen::MatrixXd scatter = centered.transpose() * centered;

  NiwParams post;
  post.kappa = prior.kappa + dn;
  post.dof = prior.dof + dn;
  post.mean = (prior.kappa * prior.mean + dn * xbar) / post.kappa;
  Eigen::VectorXd dev = xbar - prior.mean;
  post.scale = prior.scale + scatter +
               (prior.kappa * dn / post.kappa) * (dev * dev.transpose());
  return post;
}

GaussianComponent niw_sample(const NiwParams& params, Rng& rng) {
  validate_niw(params);
  int d = static_cast<int>(params.mean.size());

  // Bartlett draw: A A^T ~ Wishart(I, dof), so (Ls^-T A)(...)^T ~
  // Wishart(scale^-1, dof) with Ls the Cholesky factor of the scale matrix.
  // The covariance is its inverse, B^T B with B = A^-1 Ls^T.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.chisq(params.dof - static_cast<double>(i)));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  Eigen::MatrixXd Ls =
      Eigen::LLT<Eigen::MatrixXd>(params.scale).matrixL();
  Eigen::MatrixXd B =
      A.triangularView<Eigen::Lower>().solve(Ls.transpose());
  Eigen::MatrixXd cov = B.transpose() * B;

  Eigen::MatrixXd Lc = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  Eigen::VectorXd mean = params.mean + Lc * z / std::sqrt(params.kappa);
  return {mean, cov};
}

AlphaVector sample_alphas(const LayeredDag& ldag, double alpha0, Rng& rng,
                          AlphaAccessLog* log) {
  if (!(alpha0 > 0.0))
    fail(Errc::ZeroConcentration, "alpha0 must be positive");
  AlphaVector alpha(static_cast<std::size_t>(ldag.dag.node_count) + 1, 0.0);
  for (int j : ldag.topo) {
    double shape = alpha0;
    if (j != ldag.root) {
      shape = 0.0;
      for (int p : ldag.dag.parents[static_cast<std::size_t>(j)]) {
        shape += alpha[static_cast<std::size_t>(p)];
        if (log) log->reads.emplace_back(j, p);
      }
    }
    alpha[static_cast<std::size_t>(j)] = rng.gamma(shape, 1.0);
  }
  return alpha;
}

void validate_config(const GdpConfig& cfg) {
  if (cfg.L < 2) fail(Errc::ConfigMismatch, "truncation L must be >= 2");
  if (!(cfg.alpha0 > 0.0)) fail(Errc::ConfigMismatch, "alpha0 must be positive");
  if (cfg.mcmc.iterations <= cfg.mcmc.burnin)
    fail(Errc::ConfigMismatch, "burn-in must be smaller than iterations");
  if (cfg.mcmc.thinning < 1) fail(Errc::ConfigMismatch, "thinning must be >= 1");
  if (cfg.mcmc.chains < 1) fail(Errc::ConfigMismatch, "chain count must be >= 1");
  if (!(cfg.proposal.target_accept > 0.0 && cfg.proposal.target_accept < 1.0))
    fail(Errc::ConfigMismatch, "target acceptance must lie in (0,1)");
  if (cfg.proposal.adapt_window < 1)
    fail(Errc::ConfigMismatch, "adaptation window must be >= 1");
  validate_niw(cfg.niw);
}

}  // namespace gdp
