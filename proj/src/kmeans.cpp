#include "gdp/kmeans.hpp"

#include <limits>
#include <string>
#include <vector>

#include "gdp/error.hpp"

namespace gdp {

namespace {

// Squared distance from every row to its nearest chosen centroid.
void nearest_sq(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                int used, std::vector<double>& d2, std::vector<int>& which) {
  for (long i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < used; ++c) {
      double d = (data.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    d2[static_cast<std::size_t>(i)] = best;
    which[static_cast<std::size_t>(i)] = arg;
  }
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& data, int k, int max_iters,
                    Rng& rng) {
  long n = data.rows();
  if (k < 1 || k > n)
    fail(Errc::KTooLarge, "k = " + std::to_string(k) + " with " +
                              std::to_string(n) + " points");

  Eigen::MatrixXd centroids(k, data.cols());
  std::vector<double> d2(static_cast<std::size_t>(n));
  std::vector<int> which(static_cast<std::size_t>(n));

  // Seeding: first centroid uniform, the rest proportional to the squared
  // distance from the centroids chosen so far.
  long first = static_cast<long>(rng.raw() % static_cast<std::uint64_t>(n));
  centroids.row(0) = data.row(first);
  for (int c = 1; c < k; ++c) {
    nearest_sq(data, centroids, c, d2, which);
    double total = 0.0;
    for (double v : d2) total += v;
    long pick;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (long i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (u <= acc) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with existing centroids; any row works.
      pick = static_cast<long>(rng.raw() % static_cast<std::uint64_t>(n));
    }
    centroids.row(c) = data.row(pick);
  }

  KmeansResult result;
  result.labels.assign(static_cast<std::size_t>(n), 0);
  int it = 0;
  for (; it < max_iters; ++it) {
    nearest_sq(data, centroids, k, d2, which);
    bool changed = false;
    for (long i = 0; i < n; ++i)
      if (result.labels[static_cast<std::size_t>(i)] != which[static_cast<std::size_t>(i)]) {
        result.labels[static_cast<std::size_t>(i)] = which[static_cast<std::size_t>(i)];
        changed = true;
      }
    if (!changed && it > 0) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, data.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (long i = 0; i < n; ++i) {
      sums.row(result.labels[static_cast<std::size_t>(i)]) += data.row(i);
      ++counts[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seat an emptied centroid at the point farthest from its
        // assigned centroid; keeps k clusters without random restarts.
        long far = 0;
        double worst = -1.0;
        for (long i = 0; i < n; ++i)
          if (d2[static_cast<std::size_t>(i)] > worst) {
            worst = d2[static_cast<std::size_t>(i)];
            far = i;
          }
        centroids.row(c) = data.row(far);
      }
    }
  }

  nearest_sq(data, centroids, k, d2, which);
  result.sse = 0.0;
  for (long i = 0; i < n; ++i) {
    result.labels[static_cast<std::size_t>(i)] = which[static_cast<std::size_t>(i)];
    result.sse += d2[static_cast<std::size_t>(i)];
  }
  result.centroids = std::move(centroids);
  result.iterations = it;
  return result;
}

}  // namespace gdp
