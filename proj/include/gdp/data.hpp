#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gdp {

// Observations for each data-carrying DAG node. group_node[g] is the DAG
// node id of group g; hidden roots never appear here. true_labels is either
// empty or holds one 0-based label per observation of every group.
struct GroupedDataset {
  int dim = 0;
  std::vector<Eigen::MatrixXd> groups;        // [g]: n_g x dim
  std::vector<int> group_node;                // [g] -> node id
  std::vector<std::vector<int>> true_labels;  // optional, [g][i]

  int group_count() const { return static_cast<int>(groups.size()); }
  long total_n() const;
  bool has_truth() const { return !true_labels.empty(); }
};

// DimensionMismatch if groups disagree on dim or labels misalign;
// ConfigMismatch on duplicate node ids.
void validate_dataset(const GroupedDataset& data);

// All observations stacked in group order; rows map back to groups by size.
Eigen::MatrixXd pooled_matrix(const GroupedDataset& data);

// Per-group label vectors concatenated in group order.
std::vector<int> flatten_labels(const std::vector<std::vector<int>>& labels);

// CSV helpers. Matrices are written with header x1..xd and full double
// precision so a write/read round trip is exact. Labels use header "label".
void write_matrix_csv(const std::string& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::vector<int>& labels);
std::vector<int> read_labels_csv(const std::string& path);

}  // namespace gdp
