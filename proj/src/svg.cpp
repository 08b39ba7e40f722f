// Copyright 2026 The transduce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "transduce/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const std::array<const char*, 6> kLineColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  if (a >= 1e4 || a < 1e-2) {
    std::snprintf(buf, sizeof(buf), "%.3g", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.4g", v);
  }
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

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h == l ? 0.5 : (a - l) / (h - l);
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int a = static_cast<int>(std::floor(std::log10(lo) + 1e-9));
      const int b = static_cast<int>(std::ceil(std::log10(hi) - 1e-9));
      for (int e = a; e <= b; ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) t.push_back(v);
      }
      if (t.size() < 2) {
        t = {lo, hi};
      }
      return t;
    }
    for (int k = 0; k <= 4; ++k) t.push_back(lo + (hi - lo) * k / 4.0);
    return t;
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!usable(v, log)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (lo == hi) {
    if (log) {
      lo /= 2.0;
      hi *= 2.0;
    } else {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

// Perceptually ordered dark-blue to yellow ramp.
std::string ramp(double t) {
  static const std::array<std::array<double, 3>, 5> anchors = {{{68, 1, 84},
                                                                {59, 82, 139},
                                                                {33, 145, 140},
                                                                {94, 201, 98},
                                                                {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const auto i = std::min<std::size_t>(3, static_cast<std::size_t>(t));
  const double f = t - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0]))),
                static_cast<int>(std::lround(anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1]))),
                static_cast<int>(std::lround(anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2]))));
  return buf;
}

void frame(std::ostringstream& out, const PlotOptions& o, const Axis& ax, const Axis& ay) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double t : ax.ticks()) {
    const double x = kLeft + ax.map(t) * pw;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"#000\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 20)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = kTop + (1.0 - ay.map(t)) * ph;
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(y) << "\" stroke=\"#000\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">" << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(o.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-size=\"14\" transform=\"rotate(-90 18 " << num(kTop + ph / 2) << ")\">"
      << escape(o.y_label) << "</text>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"16\">" << escape(o.title) << "</text>\n";
}

std::string header() {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  return out.str();
}

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("line_plot_svg: x and y sizes differ");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = make_axis(xs, options.log_x);
  const Axis ay = make_axis(ys, options.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  std::ostringstream out;
  out << header();
  frame(out, options, ax, ay);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kLineColors[k % kLineColors.size()];
    std::string path;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], options.log_x) || !usable(s.y[i], options.log_y)) {
        pen = false;
        continue;
      }
      const double x = kLeft + ax.map(s.x[i]) * pw;
      const double y = kTop + (1.0 - ay.map(s.y[i])) * ph;
      path += (pen ? " L" : " M") + num(x) + " " + num(y);
      pen = true;
    }
    if (!path.empty()) {
      out << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\"/>\n";
    }
    if (s.x.size() <= 40) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!usable(s.x[i], options.log_x) || !usable(s.y[i], options.log_y)) continue;
        out << "<circle cx=\"" << num(kLeft + ax.map(s.x[i]) * pw) << "\" cy=\""
            << num(kTop + (1.0 - ay.map(s.y[i])) * ph) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    const double ly = kTop + 20.0 + 22.0 * static_cast<double>(k);
    out << "<line x1=\"" << num(kWidth - kRight + 15) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight + 40) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight + 46) << "\" y=\"" << num(ly + 4)
        << "\" font-size=\"12\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& z, const PlotOptions& options,
                        const std::string& z_label) {
  if (x.empty() || y.empty() || z.size() != x.size() * y.size()) {
    throw InvalidArgument("heatmap_svg: z must have x.size() * y.size() entries");
  }
  // Cell edges halfway between samples (geometric midpoints on log axes).
  const auto edges = [](const std::vector<double>& v, bool log) {
    std::vector<double> e(v.size() + 1);
    const auto mid = [log](double a, double b) { return log ? std::sqrt(a * b) : 0.5 * (a + b); };
    if (v.size() == 1) {
      e[0] = log ? v[0] / 2.0 : v[0] - 0.5;
      e[1] = log ? v[0] * 2.0 : v[0] + 0.5;
      return e;
    }
    for (std::size_t i = 1; i < v.size(); ++i) e[i] = mid(v[i - 1], v[i]);
    e[0] = log ? v[0] * v[0] / e[1] : 2.0 * v[0] - e[1];
    e.back() = log ? v.back() * v.back() / e[v.size() - 1] : 2.0 * v.back() - e[v.size() - 1];
    return e;
  };
  const std::vector<double> ex = edges(x, options.log_x);
  const std::vector<double> ey = edges(y, options.log_y);
  const Axis ax = make_axis(ex, options.log_x);
  const Axis ay = make_axis(ey, options.log_y);
  double zlo = std::numeric_limits<double>::infinity();
  double zhi = -zlo;
  for (double v : z) {
    if (!std::isfinite(v)) continue;
    zlo = std::min(zlo, v);
    zhi = std::max(zhi, v);
  }
  if (!std::isfinite(zlo)) {
    zlo = 0.0;
    zhi = 1.0;
  }
  const double zspan = zhi > zlo ? zhi - zlo : 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  std::ostringstream out;
  out << header();
  out << "<defs><pattern id=\"missing\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
      << "<rect width=\"6\" height=\"6\" fill=\"#ccc\"/><path d=\"M0 6 L6 0\" stroke=\"#888\"/>"
      << "</pattern></defs>\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double v = z[i * y.size() + j];
      const double x0 = kLeft + ax.map(ex[i]) * pw;
      const double x1 = kLeft + ax.map(ex[i + 1]) * pw;
      const double y0 = kTop + (1.0 - ay.map(ey[j + 1])) * ph;
      const double y1 = kTop + (1.0 - ay.map(ey[j])) * ph;
      const std::string fill = std::isfinite(v) ? ramp((v - zlo) / zspan) : "url(#missing)";
      out << "<rect x=\"" << num(std::min(x0, x1)) << "\" y=\"" << num(std::min(y0, y1))
          << "\" width=\"" << num(std::abs(x1 - x0)) << "\" height=\"" << num(std::abs(y1 - y0))
          << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  frame(out, options, ax, ay);

  const double bx = kWidth - kRight + 30.0;
  const int steps = 40;
  for (int k = 0; k < steps; ++k) {
    const double t = (k + 0.5) / steps;
    const double yy = kTop + ph * (1.0 - static_cast<double>(k + 1) / steps);
    out << "<rect x=\"" << num(bx) << "\" y=\"" << num(yy) << "\" width=\"20\" height=\""
        << num(ph / steps + 0.5) << "\" fill=\"" << ramp(t) << "\"/>\n";
  }
  out << "<rect x=\"" << num(bx) << "\" y=\"" << num(kTop) << "\" width=\"20\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = zlo + zspan * k / 4.0;
    const double yy = kTop + ph * (1.0 - k / 4.0);
    out << "<text x=\"" << num(bx + 26) << "\" y=\"" << num(yy + 4) << "\" font-size=\"12\">"
        << tick_label(v) << "</text>\n";
  }
  out << "<text x=\"" << num(bx) << "\" y=\"" << num(kTop - 8) << "\" font-size=\"12\">"
      << escape(z_label) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace transduce
