#include "gdp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gdp/error.hpp"
#include "gdp/mathutil.hpp"

namespace gdp {

namespace {

const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5"};
constexpr int kPaletteSize = 20;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Short fixed-precision value for axis annotations.
std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Range of(const std::vector<double>& xs) {
    Range r{xs.front(), xs.front()};
    for (double v : xs) r.include(v);
    return r;
  }
  // Avoids zero-width scales for constant data.
  void widen() {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  double unit(double v) const { return (v - lo) / (hi - lo); }
};

void open_svg(std::ostringstream& out, int w, int h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
}

void panel_frame(std::ostringstream& out, double x, double y, double w,
                 double h, const std::string& title) {
  out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
      << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << num(x + w / 2) << "\" y=\"" << num(y - 6)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#000000\">"
        << title << "</text>\n";
}

}  // namespace

std::string trace_svg(const std::vector<std::vector<double>>& traces) {
  if (traces.empty()) fail(Errc::EmptyChains, "no traces to plot");
  const int panel_w = 560, panel_h = 150, margin = 50, gap = 40;
  int h = margin + static_cast<int>(traces.size()) * (panel_h + gap);
  std::ostringstream out;
  open_svg(out, panel_w + 2 * margin, h);

  for (std::size_t c = 0; c < traces.size(); ++c) {
    const auto& tr = traces[c];
    double x0 = margin, y0 = margin + static_cast<double>(c) * (panel_h + gap);
    panel_frame(out, x0, y0, panel_w, panel_h,
                "chain " + std::to_string(c) + " log-likelihood");
    if (tr.empty()) continue;
    Range r = Range::of(tr);
    r.widen();
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[c % kPaletteSize]
        << "\" stroke-width=\"0.8\" points=\"";
    // Long traces are decimated to one point per horizontal pixel pair.
    std::size_t step = std::max<std::size_t>(1, tr.size() / (panel_w / 2));
    for (std::size_t i = 0; i < tr.size(); i += step) {
      double px = x0 + (static_cast<double>(i) /
                        static_cast<double>(std::max<std::size_t>(1, tr.size() - 1))) *
                           panel_w;
      double py = y0 + panel_h - r.unit(tr[i]) * panel_h;
      out << num(px) << ',' << num(py) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(y0 + 10)
        << "\" font-size=\"10\" text-anchor=\"end\">" << tick(r.hi) << "</text>\n";
    out << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(y0 + panel_h)
        << "\" font-size=\"10\" text-anchor=\"end\">" << tick(r.lo) << "</text>\n";
    out << "<text x=\"" << num(x0 + panel_w) << "\" y=\""
        << num(y0 + panel_h + 14) << "\" font-size=\"10\" text-anchor=\"end\">"
        << tr.size() << " iterations</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string scatter_svg(const std::vector<ScatterPanel>& panels) {
  if (panels.empty()) fail(Errc::EmptyChains, "no panels to plot");
  const int panel = 220, margin = 46, gap = 44;
  int cols = std::min<int>(4, static_cast<int>(panels.size()));
  int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  int w = margin + cols * (panel + gap);
  int h = margin + rows * (panel + gap);
  std::ostringstream out;
  open_svg(out, w, h);

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const ScatterPanel& sp = panels[p];
    if (sp.points.rows() != static_cast<long>(sp.labels.size()))
      fail(Errc::LengthMismatch, "panel labels do not match points");
    double x0 = margin + static_cast<double>(p % static_cast<std::size_t>(cols)) * (panel + gap);
    double y0 = margin + static_cast<double>(p / static_cast<std::size_t>(cols)) * (panel + gap);
    panel_frame(out, x0, y0, panel, panel, sp.title);
    if (sp.points.rows() == 0) continue;

    Range rx{sp.points(0, 0), sp.points(0, 0)};
    Range ry{sp.points(0, 1), sp.points(0, 1)};
    for (long i = 0; i < sp.points.rows(); ++i) {
      rx.include(sp.points(i, 0));
      ry.include(sp.points(i, 1));
    }
    rx.widen();
    ry.widen();
    for (long i = 0; i < sp.points.rows(); ++i) {
      double px = x0 + rx.unit(sp.points(i, 0)) * panel;
      double py = y0 + panel - ry.unit(sp.points(i, 1)) * panel;
      out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py)
          << "\" r=\"2.2\" fill=\""
          << kPalette[static_cast<std::size_t>(
                 ((sp.labels[static_cast<std::size_t>(i)] % kPaletteSize) +
                  kPaletteSize) %
                 kPaletteSize)]
          << "\" fill-opacity=\"0.75\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string boxplot_svg(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& values,
                        const std::string& y_label) {
  if (names.size() != values.size())
    fail(Errc::LengthMismatch, "series names do not match value lists");
  if (names.empty()) fail(Errc::EmptyChains, "no series to plot");
  for (const auto& v : values)
    if (v.empty()) fail(Errc::EmptySamples, "empty series in boxplot");

  const int plot_w = 420, plot_h = 300, margin = 60;
  std::ostringstream out;
  open_svg(out, plot_w + 2 * margin, plot_h + 2 * margin);

  Range r{values[0][0], values[0][0]};
  for (const auto& v : values)
    for (double x : v) r.include(x);
  r.widen();

  panel_frame(out, margin, margin, plot_w, plot_h, y_label);
  auto ypix = [&](double v) {
    return margin + plot_h - r.unit(v) * plot_h;
  };
  // Type-7 quantile (linear interpolation), matching the usual default.
  auto quantile = [](std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double hpos = p * (static_cast<double>(v.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(hpos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = hpos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };

  double slot = static_cast<double>(plot_w) / static_cast<double>(names.size());
  for (std::size_t s = 0; s < names.size(); ++s) {
    double cx = margin + slot * (static_cast<double>(s) + 0.5);
    double box_w = slot * 0.4;
    double q1 = quantile(values[s], 0.25), q2 = quantile(values[s], 0.5),
           q3 = quantile(values[s], 0.75);
    double vmin = *std::min_element(values[s].begin(), values[s].end());
    double vmax = *std::max_element(values[s].begin(), values[s].end());
    const char* color = kPalette[s % kPaletteSize];

    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(ypix(vmin))
        << "\" x2=\"" << num(cx) << "\" y2=\"" << num(ypix(vmax))
        << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    for (double w : {vmin, vmax})
      out << "<line x1=\"" << num(cx - box_w / 4) << "\" y1=\"" << num(ypix(w))
          << "\" x2=\"" << num(cx + box_w / 4) << "\" y2=\"" << num(ypix(w))
          << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out << "<rect x=\"" << num(cx - box_w / 2) << "\" y=\"" << num(ypix(q3))
        << "\" width=\"" << num(box_w) << "\" height=\""
        << num(ypix(q1) - ypix(q3)) << "\" fill=\"" << color
        << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
    out << "<line x1=\"" << num(cx - box_w / 2) << "\" y1=\"" << num(ypix(q2))
        << "\" x2=\"" << num(cx + box_w / 2) << "\" y2=\"" << num(ypix(q2))
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(cx) << "\" y=\""
        << num(margin + plot_h + 18) << "\" font-size=\"12\" text-anchor=\"middle\">"
        << names[s] << "</text>\n";
  }
  out << "<text x=\"" << num(margin - 6.0) << "\" y=\"" << num(margin + 10.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << tick(r.hi) << "</text>\n";
  out << "<text x=\"" << num(margin - 6.0) << "\" y=\""
      << num(margin + plot_h) << "\" font-size=\"10\" text-anchor=\"end\">"
      << tick(r.lo) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace gdp
