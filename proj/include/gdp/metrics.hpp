#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "gdp/gibbs.hpp"

namespace gdp {

// One pooled 0-based label vector per retained sample, groups concatenated
// in dataset order, chains concatenated in chain order.
std::vector<std::vector<int>> pooled_label_draws(
    const std::vector<ChainSamples>& chains);

// Posterior pairwise same-cluster frequencies. Symmetric, unit diagonal,
// entries in [0, 1].
Eigen::MatrixXd coclustering(const std::vector<std::vector<int>>& draws);

struct DahlResult {
  std::vector<int> labels;        // pooled partition of the chosen sample
  std::size_t sample_index = 0;   // index into draws; earliest on ties
  double loss = 0.0;              // squared deviation from the frequency matrix
};

// The sampled partition closest to the co-clustering matrix in squared loss.
DahlResult dahl_point_estimate(const std::vector<std::vector<int>>& draws,
                               const Eigen::MatrixXd& freq);

// Permutation-model-corrected Rand index. Degenerate pairs (both partitions
// single-cluster or both all-singletons) score 1; other zero-denominator
// cases score 0.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Internal validation indices over rows of data labelled by `labels`.
// All three require at least two distinct labels.
double calinski_harabasz(const Eigen::MatrixXd& data, const std::vector<int>& labels);
double davies_bouldin(const Eigen::MatrixXd& data, const std::vector<int>& labels);
double silhouette(const Eigen::MatrixXd& data, const std::vector<int>& labels);

struct MetricReport {
  std::string method;
  std::vector<double> per_group_ari;  // empty when truth is unavailable
  double pooled_ari = 0.0;
  double chi = 0.0;
  double dbi = 0.0;
  double si = 0.0;
  double seconds = 0.0;
};

}  // namespace gdp
