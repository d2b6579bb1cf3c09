#include "gdp/data.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gdp/error.hpp"

namespace gdp {

long GroupedDataset::total_n() const {
  long n = 0;
  for (const auto& g : groups) n += g.rows();
  return n;
}

void validate_dataset(const GroupedDataset& data) {
  if (data.groups.empty()) fail(Errc::ConfigMismatch, "dataset has no groups");
  if (data.group_node.size() != data.groups.size())
    fail(Errc::ConfigMismatch, "group_node does not match group count");
  std::set<int> seen;
  for (int id : data.group_node)
    if (!seen.insert(id).second)
      fail(Errc::ConfigMismatch,
           "node " + std::to_string(id) + " mapped to two groups");
  for (const auto& g : data.groups)
    if (g.cols() != data.dim)
      fail(Errc::DimensionMismatch, "group dimension differs from dataset dim");
  if (!data.true_labels.empty()) {
    if (data.true_labels.size() != data.groups.size())
      fail(Errc::LengthMismatch, "true_labels group count mismatch");
    for (std::size_t g = 0; g < data.groups.size(); ++g)
      if (static_cast<long>(data.true_labels[g].size()) != data.groups[g].rows())
        fail(Errc::LengthMismatch,
             "true_labels length mismatch in group " + std::to_string(g));
  }
}

Eigen::MatrixXd pooled_matrix(const GroupedDataset& data) {
  Eigen::MatrixXd out(data.total_n(), data.dim);
  long row = 0;
  for (const auto& g : data.groups) {
    out.middleRows(row, g.rows()) = g;
    row += g.rows();
  }
  return out;
}

std::vector<int> flatten_labels(const std::vector<std::vector<int>>& labels) {
  std::vector<int> flat;
  for (const auto& g : labels) flat.insert(flat.end(), g.begin(), g.end());
  return flat;
}

void write_matrix_csv(const std::string& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoFailure, "cannot open " + path + " for writing");
  for (int c = 0; c < m.cols(); ++c)
    out << (c ? "," : "") << "x" << (c + 1);
  out << "\n";
  char buf[40];
  for (long r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) fail(Errc::IoFailure, "write failed: " + path);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::SchemaMismatch, path + " is empty");
  int cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  std::vector<double> vals;
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int c = 0;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
      ++c;
    }
    if (c != cols)
      fail(Errc::SchemaMismatch, path + ": ragged row " + std::to_string(rows));
    ++rows;
  }
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = vals[static_cast<std::size_t>(r) * cols + c];
  return m;
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoFailure, "cannot open " + path + " for writing");
  out << "label\n";
  for (int l : labels) out << l << "\n";
  if (!out) fail(Errc::IoFailure, "write failed: " + path);
}

std::vector<int> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("label", 0) != 0)
    fail(Errc::SchemaMismatch, path + ": missing label header");
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    labels.push_back(std::stoi(line));
  }
  return labels;
}

}  // namespace gdp
