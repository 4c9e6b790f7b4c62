#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bargain/harness.hpp"

namespace bargain {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 540.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 48.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {  // degenerate or empty: open up a unit box
      const double c = std::isfinite(lo) ? lo : 0.0;
      lo = c - 0.5;
      hi = c + 0.5;
      return;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

// Fixed short formatting for coordinates; deterministic and compact.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

}  // namespace

void render_plot_svg(const RunReport& report, const FrontSample& front,
                     const std::string& path) {
  for (const InitResult& r : report.inits)
    if (!r.trajectory.records.empty() && r.trajectory.records.front().values.size() != 2)
      throw std::invalid_argument("render_plot_svg needs a 2-objective problem");

  Range rx, ry;
  for (const FrontSample::Entry& e : front.entries) {
    rx.grow(e.f1);
    ry.grow(e.f2);
  }
  for (const InitResult& r : report.inits) {
    for (const TrajectoryRecord& rec : r.trajectory.records) {
      rx.grow(rec.values[0]);
      ry.grow(rec.values[1]);
    }
  }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double v) {
    return kMarginLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w;
  };
  const auto sy = [&](double v) {
    return kMarginTop + (ry.hi - v) / (ry.hi - ry.lo) * plot_h;
  };

  const std::string label_x =
      report.objective_labels.size() == 2 ? report.objective_labels[0] : "objective 1";
  const std::string label_y =
      report.objective_labels.size() == 2 ? report.objective_labels[1] : "objective 2";

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " "
      << num(kHeight) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kMarginTop)
      << "\" x2=\"" << num(kMarginLeft) << "\" y2=\"" << num(kHeight - kMarginBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kHeight - kMarginBottom)
      << "\" x2=\"" << num(kWidth - kMarginRight) << "\" y2=\""
      << num(kHeight - kMarginBottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
    svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kHeight - kMarginBottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    svg << "<text x=\"" << num(kMarginLeft - 8) << "\" y=\"" << num(sy(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  svg << "<text x=\"" << num(kMarginLeft + plot_w / 2) << "\" y=\""
      << num(kHeight - 10) << "\" font-size=\"13\" text-anchor=\"middle\">"
      << escape_xml(label_x) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << num(kMarginTop + plot_h / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(kMarginTop + plot_h / 2) << ")\">" << escape_xml(label_y) << "</text>\n";

  if (!front.entries.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#7f7f7f\" stroke-width=\"2.5\" points=\"";
    for (const FrontSample::Entry& e : front.entries)
      svg << num(sx(e.f1)) << "," << num(sy(e.f2)) << " ";
    svg << "\"/>\n";
  }

  for (const InitResult& r : report.inits) {
    const char* color = kPalette[static_cast<size_t>(r.index) %
                                 (sizeof kPalette / sizeof kPalette[0])];
    if (r.trajectory.records.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\" opacity=\"0.8\" points=\"";
      // thin long trajectories to at most ~2000 polyline vertices
      const size_t n = r.trajectory.records.size();
      const size_t stride = std::max<size_t>(1, n / 2000);
      for (size_t i = 0; i < n; i += stride) {
        const TrajectoryRecord& rec = r.trajectory.records[i];
        svg << num(sx(rec.values[0])) << "," << num(sy(rec.values[1])) << " ";
      }
      const TrajectoryRecord& last = r.trajectory.records.back();
      svg << num(sx(last.values[0])) << "," << num(sy(last.values[1]));
      svg << "\"/>\n";
    }
  }

  // start markers (filled circles), then final markers (crosses) on top
  for (const InitResult& r : report.inits) {
    if (r.trajectory.records.empty()) continue;
    const char* color = kPalette[static_cast<size_t>(r.index) %
                                 (sizeof kPalette / sizeof kPalette[0])];
    const TrajectoryRecord& first = r.trajectory.records.front();
    svg << "<circle class=\"init-marker\" cx=\"" << num(sx(first.values[0]))
        << "\" cy=\"" << num(sy(first.values[1])) << "\" r=\"5\" fill=\"" << color
        << "\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
  }
  for (const InitResult& r : report.inits) {
    if (r.trajectory.records.empty()) continue;
    const char* color = kPalette[static_cast<size_t>(r.index) %
                                 (sizeof kPalette / sizeof kPalette[0])];
    const TrajectoryRecord& last = r.trajectory.records.back();
    const double cx = sx(last.values[0]);
    const double cy = sy(last.values[1]);
    svg << "<path class=\"final-marker\" d=\"M " << num(cx - 5) << " " << num(cy - 5)
        << " L " << num(cx + 5) << " " << num(cy + 5) << " M " << num(cx - 5) << " "
        << num(cy + 5) << " L " << num(cx + 5) << " " << num(cy - 5) << "\" stroke=\""
        << color << "\" stroke-width=\"2.5\" fill=\"none\"/>\n";
  }

  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << svg.str();
}

}  // namespace bargain
