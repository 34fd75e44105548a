#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "alee/cli.hpp"

namespace alee::cli {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 50.0;
constexpr double kMarginR = 15.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 40.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Maps data coordinates into one panel's plotting box.
struct Frame {
  double ox, oy;  // panel origin
  double x0, x1, y0, y1;

  double px(double x) const {
    return ox + kMarginL + (x - x0) / (x1 - x0) * (kPanelW - kMarginL - kMarginR);
  }
  double py(double y) const {
    return oy + kPanelH - kMarginB - (y - y0) / (y1 - y0) * (kPanelH - kMarginT - kMarginB);
  }
};

void axes(std::ostringstream& os, const Frame& f, const std::string& title,
          const std::string& x_label, int x_ticks, int y_ticks) {
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect x=\"" << num(f.px(f.x0)) << "\" y=\"" << num(f.py(f.y1)) << "\" width=\""
     << num(f.px(f.x1) - f.px(f.x0)) << "\" height=\"" << num(f.py(f.y0) - f.py(f.y1))
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= x_ticks; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / x_ticks;
    os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(f.y0) + 14)
       << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  for (int i = 0; i <= y_ticks; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / y_ticks;
    os << "<text x=\"" << num(f.px(f.x0) - 4) << "\" y=\"" << num(f.py(y) + 4)
       << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  os << "<text x=\"" << num(f.ox + kPanelW / 2) << "\" y=\"" << num(f.oy + 18)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(title) << "</text>\n";
  os << "<text x=\"" << num(f.ox + kPanelW / 2) << "\" y=\"" << num(f.oy + kPanelH - 6)
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "</g>\n";
}

void open_svg(std::ostringstream& os, double w, double h) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w)
     << "\" height=\"" << num(h) << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_histogram(const std::vector<HistogramPanel>& panels, int bins) {
  if (panels.empty()) throw DataError("histogram: nothing to plot");
  if (bins < 1) throw InvalidInput("histogram: bins must be >= 1");
  std::ostringstream os;
  open_svg(os, kPanelW * static_cast<double>(panels.size()), kPanelH);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    double lo = -4.0, hi = 4.0;
    for (double v : panel.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, std::floor(v));
      hi = std::max(hi, std::ceil(v));
    }
    lo = std::max(lo, -10.0);
    hi = std::min(hi, 10.0);
    const double bw = (hi - lo) / bins;
    std::vector<long> counts(bins, 0);
    long total = 0;
    for (double v : panel.values) {
      if (!std::isfinite(v)) continue;
      const int b = std::clamp(static_cast<int>(std::floor((v - lo) / bw)), 0, bins - 1);
      ++counts[b];
      ++total;
    }
    double ymax = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (long c : counts) {
      if (total) ymax = std::max(ymax, static_cast<double>(c) / (total * bw));
    }
    ymax = std::ceil(ymax * 10.0 * 1.05) / 10.0;
    const Frame f{kPanelW * static_cast<double>(p), 0.0, lo, hi, 0.0, ymax};

    os << "<g fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\">\n";
    for (int b = 0; b < bins; ++b) {
      if (!counts[b]) continue;
      const double density = static_cast<double>(counts[b]) / (total * bw);
      const double x = lo + b * bw;
      os << "<rect x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(density)) << "\" width=\""
         << num(f.px(x + bw) - f.px(x)) << "\" height=\"" << num(f.py(0) - f.py(density))
         << "\"/>\n";
    }
    os << "</g>\n";
    os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    constexpr int kSteps = 200;
    for (int i = 0; i <= kSteps; ++i) {
      const double x = lo + (hi - lo) * i / kSteps;
      const double y = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      os << (i ? " " : "") << num(f.px(x)) << ',' << num(f.py(y));
    }
    os << "\"/>\n";
    axes(os, f, panel.title + " (n = " + std::to_string(total) + ")", "standardized error", 4, 4);
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_coverage_curve(const std::vector<CurveSeries>& series, const std::string& x_label,
                               bool diagonal) {
  if (series.empty()) throw DataError("coverage curve: nothing to plot");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      const double se = std::isfinite(pt.se) ? pt.se : 0.0;
      x0 = std::min(x0, pt.x);
      x1 = std::max(x1, pt.x);
      y0 = std::min(y0, pt.y - se);
      y1 = std::max(y1, pt.y + se);
    }
  }
  if (!std::isfinite(x0)) throw DataError("coverage curve: no points");
  if (diagonal) {
    y0 = std::min(y0, x0);
    y1 = std::max(y1, x1);
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  const double pad = 0.05 * std::max(y1 - y0, 0.01);
  y0 = std::max(0.0, y0 - pad);
  y1 = std::min(1.0, y1 + pad);
  if (y1 <= y0) y1 = y0 + 0.01;

  const double legend_h = 16.0 * static_cast<double>(series.size());
  std::ostringstream os;
  open_svg(os, kPanelW + 130.0, std::max(kPanelH, legend_h + 40.0));
  const Frame f{0.0, 0.0, x0, x1, y0, y1};
  if (diagonal) {
    os << "<line x1=\"" << num(f.px(x0)) << "\" y1=\"" << num(f.py(x0)) << "\" x2=\""
       << num(f.px(x1)) << "\" y2=\"" << num(f.py(x1))
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    os << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    os << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      os << (j ? " " : "") << num(f.px(s.points[j].x)) << ',' << num(f.py(s.points[j].y));
    }
    os << "\"/>\n";
    for (const auto& pt : s.points) {
      os << "<circle cx=\"" << num(f.px(pt.x)) << "\" cy=\"" << num(f.py(pt.y)) << "\" r=\"2.5\"/>\n";
      if (std::isfinite(pt.se) && pt.se > 0.0) {
        os << "<line x1=\"" << num(f.px(pt.x)) << "\" y1=\"" << num(f.py(pt.y - pt.se))
           << "\" x2=\"" << num(f.px(pt.x)) << "\" y2=\"" << num(f.py(pt.y + pt.se)) << "\"/>\n";
      }
    }
    os << "</g>\n";
    const double ly = kMarginT + 10.0 + 16.0 * static_cast<double>(i);
    os << "<rect x=\"" << num(kPanelW + 5) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" "
       << "height=\"10\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << num(kPanelW + 20) << "\" y=\"" << num(ly)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  axes(os, f, "coverage", x_label, 4, 4);
  os << "</svg>\n";
  return os.str();
}

}  // namespace alee::cli
