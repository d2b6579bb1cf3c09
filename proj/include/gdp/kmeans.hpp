#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gdp/rng.hpp"

namespace gdp {

struct KmeansResult {
  std::vector<int> labels;    // 0-based cluster per row
  Eigen::MatrixXd centroids;  // k x d
  double sse = 0.0;           // within-cluster sum of squared distances
  int iterations = 0;         // Lloyd rounds actually run
};

// Lloyd's algorithm with distance-squared-weighted seeding. Deterministic
// under the generator state; stops at an assignment fixed point or after
// max_iters rounds.
KmeansResult kmeans(const Eigen::MatrixXd& data, int k, int max_iters, Rng& rng);

}  // namespace gdp
