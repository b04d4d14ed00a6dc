// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "guarddiv/report.hpp"

// Origin is top-left and y grows downward, per SVG convention. The gamma
// axis is symmetric-log: |gamma| below the smallest nonzero sample maps
// linearly onto [-1, 1], each decade above it adds one unit.

namespace guarddiv::report {

namespace {

constexpr double kWidth = 960;
constexpr double kHeight = 540;
constexpr double kLeft = 90;
constexpr double kRight = 180;
constexpr double kTop = 50;
constexpr double kBottom = 70;

std::string_view color(forensics::Region r) {
  using forensics::Region;
  switch (r) {
    case Region::Exact: return "#2ca02c";
    case Region::NumeratorUnderflow: return "#e6b800";
    case Region::DenominatorUnderflow: return "#d62728";
    case Region::GuardedUnperturbed: return "#000000";
    case Region::Partial: return "#8c564b";
  }
  return "#7f7f7f";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string escape(std::string_view s) {
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

struct SymLog {
  double threshold = 1.0;
  double operator()(double g) const {
    const double a = std::fabs(g);
    if (a < threshold) return g / threshold;
    const double u = std::log10(a / threshold) + 1.0;
    return g < 0 ? -u : u;
  }
};

struct Point {
  double u;
  double y;
  forensics::Region region;
};

}  // namespace

std::string render_svg(std::span<const CsvRow> rows, const PlotOptions& opts) {
  if (rows.empty()) {
    throw UsageError("no samples to plot");
  }
  const bool log_y = opts.transform == Transform::Subtract4LogAbs;

  SymLog symlog;
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double a = std::fabs(r.gamma);
    if (a > 0.0 && std::isfinite(a)) {
      min_abs = std::min(min_abs, a);
      max_abs = std::max(max_abs, a);
    }
  }
  if (max_abs > 0.0) symlog.threshold = min_abs;
  const double u_max = max_abs > 0.0 ? symlog(max_abs) : 1.0;

  std::vector<Point> points;
  bool has_zero = false;
  for (const auto& r : rows) {
    double y = opts.quantity == PlotQuantity::Value ? r.value : r.grad;
    if (!std::isfinite(y)) continue;
    if (log_y) {
      const double d = std::fabs(y - 4.0);
      if (d == 0.0) {
        has_zero = true;
        y = -std::numeric_limits<double>::infinity();
      } else {
        y = std::log10(d);
      }
    }
    points.push_back({symlog(r.gamma), y, r.region});
  }

  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (std::isfinite(p.y)) {
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (log_y) {
    y_lo = std::floor(y_lo) - (has_zero ? 1.0 : 0.0);
    y_hi = std::ceil(y_hi);
    for (auto& p : points) {
      if (!std::isfinite(p.y)) p.y = y_lo;  // exact zeros sit on the floor
    }
  }
  if (y_hi <= y_lo) {
    const double pad = y_lo == 0.0 ? 1.0 : std::fabs(y_lo) * 0.1;
    y_lo -= pad;
    y_hi += pad;
  } else if (!log_y) {
    const double pad = (y_hi - y_lo) * 0.05;
    y_lo -= pad;
    y_hi += pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double u) { return kLeft + (u + u_max) / (2 * u_max) * plot_w; };
  auto sy = [&](double y) {
    return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h;
  };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) +
       "\" height=\"" + px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) + " " +
       px(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + px(kWidth) + "\" height=\"" +
       px(kHeight) + "\" style=\"fill:#ffffff\"/>\n";
  if (!opts.title.empty()) {
    s += "<text x=\"" + px(kLeft + plot_w / 2) +
         "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(opts.title) + "</text>\n";
  }
  s += "<rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" +
       px(plot_w) + "\" height=\"" + px(plot_h) +
       "\" style=\"fill:none;stroke:#333333;stroke-width:1\"/>\n";

  // gamma ticks: 0 and +-10^k, thinned to about six per side
  s += "<g class=\"x-ticks\">\n";
  auto x_tick = [&](double u, const std::string& label) {
    const double x = sx(u);
    s += "<line x1=\"" + px(x) + "\" y1=\"" + px(kTop + plot_h) + "\" x2=\"" +
         px(x) + "\" y2=\"" + px(kTop + plot_h + 5) +
         "\" style=\"stroke:#333333\"/>\n";
    s += "<text x=\"" + px(x) + "\" y=\"" + px(kTop + plot_h + 18) +
         "\" text-anchor=\"middle\">" + label + "</text>\n";
  };
  x_tick(0.0, "0");
  if (max_abs > 0.0) {
    const int lo = static_cast<int>(std::ceil(std::log10(min_abs)));
    const int hi = static_cast<int>(std::floor(std::log10(max_abs)));
    const int step = std::max(1, (hi - lo + 1 + 5) / 6);
    for (int k = hi; k >= lo; k -= step) {
      const double g = std::pow(10.0, k);
      const std::string mag = "1e" + std::to_string(k);
      x_tick(symlog(g), mag);
      x_tick(symlog(-g), "-" + mag);
    }
  }
  s += "</g>\n";

  s += "<g class=\"y-ticks\">\n";
  auto y_tick = [&](double y, const std::string& label) {
    const double py = sy(y);
    s += "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(py) + "\" x2=\"" +
         px(kLeft) + "\" y2=\"" + px(py) + "\" style=\"stroke:#333333\"/>\n";
    s += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(py + 4) +
         "\" text-anchor=\"end\">" + label + "</text>\n";
  };
  if (log_y) {
    const int span = static_cast<int>(y_hi - y_lo);
    const int step = std::max(1, (span + 7) / 8);
    for (int k = static_cast<int>(y_hi); k >= static_cast<int>(y_lo); k -= step) {
      y_tick(k, "1e" + std::to_string(k));
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double y = y_lo + (y_hi - y_lo) * i / 5.0;
      y_tick(y, fmt("%.6g", y));
    }
  }
  s += "</g>\n";

  s += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"" +
       px(kHeight - 22) +
       "\" text-anchor=\"middle\">gamma (symmetric log)</text>\n";
  std::string y_label(to_string(opts.quantity));
  if (log_y) y_label = "|" + y_label + " - 4| (log)";
  s += "<text x=\"20\" y=\"" + px(kTop + plot_h / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
       px(kTop + plot_h / 2) + ")\">" + escape(y_label) + "</text>\n";

  s += "<g class=\"points\">\n";
  for (const auto& p : points) {
    s += "<circle cx=\"" + px(sx(p.u)) + "\" cy=\"" + px(sy(p.y)) +
         "\" r=\"2.5\" style=\"fill:" + std::string(color(p.region)) +
         "\"/>\n";
  }
  s += "</g>\n";

  s += "<g class=\"legend\">\n";
  double ly = kTop + 10;
  for (forensics::Region r :
       {forensics::Region::Exact, forensics::Region::Partial,
        forensics::Region::NumeratorUnderflow,
        forensics::Region::DenominatorUnderflow,
        forensics::Region::GuardedUnperturbed}) {
    const bool present = std::any_of(rows.begin(), rows.end(),
                                     [&](const CsvRow& row) { return row.region == r; });
    if (!present) continue;
    s += "<circle cx=\"" + px(kLeft + plot_w + 20) + "\" cy=\"" + px(ly) +
         "\" r=\"4\" style=\"fill:" + std::string(color(r)) + "\"/>\n";
    s += "<text x=\"" + px(kLeft + plot_w + 30) + "\" y=\"" + px(ly + 4) +
         "\">" + std::string(forensics::to_string(r)) + "</text>\n";
    ly += 18;
  }
  s += "</g>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace guarddiv::report
