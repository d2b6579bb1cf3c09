#include "gdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gdp/error.hpp"

namespace gdp {

std::vector<std::vector<int>> pooled_label_draws(
    const std::vector<ChainSamples>& chains) {
  std::vector<std::vector<int>> draws;
  for (const ChainSamples& cs : chains)
    for (const ChainState& s : cs.samples) {
      std::vector<int> pooled;
      for (const auto& group : s.labels)
        pooled.insert(pooled.end(), group.begin(), group.end());
      draws.push_back(std::move(pooled));
    }
  return draws;
}

Eigen::MatrixXd coclustering(const std::vector<std::vector<int>>& draws) {
  if (draws.empty()) fail(Errc::EmptySamples, "co-clustering needs draws");
  std::size_t n = draws.front().size();
  for (const auto& d : draws)
    if (d.size() != n)
      fail(Errc::LengthMismatch, "label draws differ in length");

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<long>(n),
                                                 static_cast<long>(n));
  for (const auto& d : draws)
    for (std::size_t a = 0; a < n; ++a) {
      counts(static_cast<long>(a), static_cast<long>(a)) += 1.0;
      for (std::size_t b = a + 1; b < n; ++b)
        if (d[a] == d[b]) {
          counts(static_cast<long>(a), static_cast<long>(b)) += 1.0;
          counts(static_cast<long>(b), static_cast<long>(a)) += 1.0;
        }
    }
  return counts / static_cast<double>(draws.size());
}

DahlResult dahl_point_estimate(const std::vector<std::vector<int>>& draws,
                               const Eigen::MatrixXd& freq) {
  if (draws.empty()) fail(Errc::EmptySamples, "point estimate needs draws");
  std::size_t n = draws.front().size();
  if (freq.rows() != static_cast<long>(n) || freq.cols() != static_cast<long>(n))
    fail(Errc::LengthMismatch, "frequency matrix does not match draw length");

  // loss(d) = sum_ab (1[same] - freq)^2 = sum_ab freq^2 + sum_same (1 - 2 freq);
  // the first term is shared, so only the same-cluster sum ranks candidates.
  double base = freq.array().square().sum();
  DahlResult best;
  double best_adj = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < draws.size(); ++s) {
    const auto& d = draws[s];
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t a = 0; a < n; ++a) members[d[a]].push_back(a);
    double adj = 0.0;
    for (const auto& [label, idx] : members) {
      (void)label;
      for (std::size_t p = 0; p < idx.size(); ++p)
        for (std::size_t q = 0; q < idx.size(); ++q)
          adj += 1.0 - 2.0 * freq(static_cast<long>(idx[p]),
                                  static_cast<long>(idx[q]));
    }
    if (adj < best_adj) {
      best_adj = adj;
      best.labels = d;
      best.sample_index = s;
    }
  }
  best.loss = base + best_adj;
  return best;
}

double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b) {
  if (a.size() != b.size())
    fail(Errc::LengthMismatch, "partitions differ in length");
  auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };

  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, cnt] : joint) index += choose2(static_cast<double>(cnt));
  for (const auto& [key, cnt] : rows) sum_a += choose2(static_cast<double>(cnt));
  for (const auto& [key, cnt] : cols) sum_b += choose2(static_cast<double>(cnt));
  double total = choose2(static_cast<double>(a.size()));
  double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return index == max_index ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

namespace {

struct ClusterView {
  std::vector<int> of_point;            // point -> dense cluster index
  std::vector<std::vector<long>> rows;  // cluster -> member rows
};

ClusterView cluster_view(const Eigen::MatrixXd& data,
                         const std::vector<int>& labels) {
  if (static_cast<long>(labels.size()) != data.rows())
    fail(Errc::LengthMismatch, "labels do not match data rows");
  std::map<int, int> dense;
  for (int l : labels) dense.emplace(l, 0);
  int next = 0;
  for (auto& [label, idx] : dense) idx = next++;
  if (next < 2)
    fail(Errc::DegenerateClustering, "need at least two clusters");
  ClusterView view;
  view.rows.resize(static_cast<std::size_t>(next));
  view.of_point.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int c = dense[labels[i]];
    view.of_point.push_back(c);
    view.rows[static_cast<std::size_t>(c)].push_back(static_cast<long>(i));
  }
  return view;
}

Eigen::MatrixXd centroids_of(const Eigen::MatrixXd& data,
                             const ClusterView& view) {
  Eigen::MatrixXd mu =
      Eigen::MatrixXd::Zero(static_cast<long>(view.rows.size()), data.cols());
  for (std::size_t c = 0; c < view.rows.size(); ++c) {
    for (long r : view.rows[c]) mu.row(static_cast<long>(c)) += data.row(r);
    mu.row(static_cast<long>(c)) /= static_cast<double>(view.rows[c].size());
  }
  return mu;
}

}  // namespace

double calinski_harabasz(const Eigen::MatrixXd& data,
                         const std::vector<int>& labels) {
  ClusterView view = cluster_view(data, labels);
  long n = data.rows();
  long k = static_cast<long>(view.rows.size());
  if (n <= k)
    fail(Errc::DegenerateClustering, "need more points than clusters");

  Eigen::RowVectorXd grand = data.colwise().mean();
  Eigen::MatrixXd mu = centroids_of(data, view);
  double between = 0.0, within = 0.0;
  for (std::size_t c = 0; c < view.rows.size(); ++c) {
    between += static_cast<double>(view.rows[c].size()) *
               (mu.row(static_cast<long>(c)) - grand).squaredNorm();
    for (long r : view.rows[c])
      within += (data.row(r) - mu.row(static_cast<long>(c))).squaredNorm();
  }
  return (between / static_cast<double>(k - 1)) /
         (within / static_cast<double>(n - k));
}

double davies_bouldin(const Eigen::MatrixXd& data,
                      const std::vector<int>& labels) {
  ClusterView view = cluster_view(data, labels);
  std::size_t k = view.rows.size();
  Eigen::MatrixXd mu = centroids_of(data, view);
  std::vector<double> spread(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (long r : view.rows[c])
      spread[c] += (data.row(r) - mu.row(static_cast<long>(c))).norm();
    spread[c] /= static_cast<double>(view.rows[c].size());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double sep = (mu.row(static_cast<long>(i)) - mu.row(static_cast<long>(j))).norm();
      worst = std::max(worst, (spread[i] + spread[j]) / sep);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

double silhouette(const Eigen::MatrixXd& data, const std::vector<int>& labels) {
  ClusterView view = cluster_view(data, labels);
  long n = data.rows();
  std::size_t k = view.rows.size();
  double total = 0.0;
  std::vector<double> mean_dist(k);
  for (long i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double sum = 0.0;
      for (long r : view.rows[c])
        if (r != i) sum += (data.row(i) - data.row(r)).norm();
      long cnt = static_cast<long>(view.rows[c].size()) -
                 (view.of_point[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1 : 0);
      mean_dist[c] = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    }
    int own = view.of_point[static_cast<std::size_t>(i)];
    // A singleton contributes 0 by convention.
    if (view.rows[static_cast<std::size_t>(own)].size() == 1) continue;
    double a = mean_dist[static_cast<std::size_t>(own)];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (static_cast<int>(c) != own) b = std::min(b, mean_dist[c]);
    double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace gdp
