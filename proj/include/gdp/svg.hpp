#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gdp {

// Deterministic static SVG renderers: same inputs, same bytes. No
// timestamps, no randomness, fixed-precision coordinates.

// One panel per chain, log-likelihood against iteration.
std::string trace_svg(const std::vector<std::vector<double>>& traces);

struct ScatterPanel {
  std::string title;
  Eigen::MatrixXd points;   // n x 2
  std::vector<int> labels;  // color index per row
};

// Grid of scatter panels (up to four per row), points colored by label.
std::string scatter_svg(const std::vector<ScatterPanel>& panels);

// One box per series: median, quartile box, min/max whiskers.
std::string boxplot_svg(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& values,
                        const std::string& y_label);

}  // namespace gdp
