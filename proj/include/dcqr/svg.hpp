#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace dcqr::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct VerticalMarker {
  double x = 0.0;
  std::string label;
  std::string color = "#888888";
};

struct Plot {
  std::string title, x_label, y_label;
  std::vector<Series> series;
  std::vector<VerticalMarker> markers;
  int width = 820, height = 540;
};

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return colors;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Tick step from the 1-2-5 sequence giving roughly `target` intervals.
inline double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  const double nice = frac < 1.5 ? 1.0 : frac < 3.0 ? 2.0 : frac < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace detail

inline std::string render(const Plot& plot) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double y_pad = 0.04 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double left = 78, right = 170, top = 44, bottom = 58;
  const double pw = plot.width - left - right, ph = plot.height - top - bottom;
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * ph; };
  using detail::num;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << detail::escape(plot.title) << "</text>\n";

  const double xs = detail::nice_step(x_hi - x_lo, 8), ys = detail::nice_step(y_hi - y_lo, 6);
  for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(t)) << "\" y2=\""
      << num(top + ph) << "\" stroke=\"#eeeeee\"/>\n";
    o << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
      << num(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  for (double t = std::ceil(y_lo / ys) * ys; t <= y_hi + 1e-9 * ys; t += ys) {
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
      << num(py(t)) << "\" stroke=\"#eeeeee\"/>\n";
    o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
      << num(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
  }
  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(plot.height - 14) << "\" text-anchor=\"middle\">"
    << detail::escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(20," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::escape(plot.y_label) << "</text>\n";

  for (const auto& m : plot.markers) {
    if (m.x < x_lo || m.x > x_hi) continue;
    o << "<line x1=\"" << num(px(m.x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(m.x)) << "\" y2=\""
      << num(top + ph) << "\" stroke=\"" << m.color << "\" stroke-dasharray=\"3,3\"/>\n";
    o << "<text x=\"" << num(px(m.x) + 3) << "\" y=\"" << num(top + 12) << "\" font-size=\"10\" fill=\"" << m.color
      << "\">" << detail::escape(m.label) << "</text>\n";
  }

  double legend_y = top + 10;
  for (const auto& s : plot.series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) o << " stroke-dasharray=\"7,4\"";
    o << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    o << "\"/>\n";
    o << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(left + pw + 36)
      << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
      << (s.dashed ? " stroke-dasharray=\"7,4\"" : "") << "/>\n";
    o << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(legend_y + 4) << "\">" << detail::escape(s.label)
      << "</text>\n";
    legend_y += 18;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace dcqr::svg
