#include "dmrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace dmrl {
namespace {

constexpr double kW = 640.0, kH = 400.0, kPad = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" +
                  num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  return s;
}

const char* palette(int g) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[((g % 10) + 10) % 10];
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::vector<double>& ys,
                           double y_min, double y_max, const std::vector<HLine>& refs) {
  const double x0 = kPad, x1 = kW - kPad, y0 = kH - kPad, y1 = kPad;
  const double span = y_max > y_min ? y_max - y_min : 1.0;
  auto sy = [&](double v) { return y0 - (std::clamp(v, y_min, y_max) - y_min) / span * (y0 - y1); };
  auto sx = [&](std::size_t i) {
    return ys.size() <= 1 ? x0 : x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(ys.size() - 1);
  };
  std::string s = header(title);
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
       num(y0) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
       num(y1) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + span * t / 4.0;
    s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(sy(v) + 4) +
         "\" text-anchor=\"end\" font-size=\"10\">" + num(v) + "</text>\n";
  }
  for (const auto& r : refs) {
    s += "<line class=\"ref\" x1=\"" + num(x0) + "\" y1=\"" + num(sy(r.y)) + "\" x2=\"" + num(x1) +
         "\" y2=\"" + num(sy(r.y)) + "\" stroke=\"" + r.color +
         "\" stroke-dasharray=\"6,4\" data-y=\"" + num(r.y) + "\"/>\n";
    s += "<text x=\"" + num(x1) + "\" y=\"" + num(sy(r.y) - 4) +
         "\" text-anchor=\"end\" font-size=\"10\" fill=\"" + r.color + "\">" + escape(r.label) +
         "</text>\n";
  }
  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (i) s += ' ';
    s += num(sx(i)) + "," + num(sy(ys[i]));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

std::string svg_scatter(const std::string& title, const std::vector<double>& xs,
                        const std::vector<double>& ys, const std::vector<int>& groups) {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!xs.empty()) {
    auto [a, b] = std::minmax_element(xs.begin(), xs.end());
    auto [c, d] = std::minmax_element(ys.begin(), ys.end());
    xlo = *a; xhi = *b; ylo = *c; yhi = *d;
  }
  if (xhi - xlo < 1e-12) { xlo -= 1; xhi += 1; }
  if (yhi - ylo < 1e-12) { ylo -= 1; yhi += 1; }
  std::string s = header(title);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = kPad + (xs[i] - xlo) / (xhi - xlo) * (kW - 2 * kPad);
    const double py = kH - kPad - (ys[i] - ylo) / (yhi - ylo) * (kH - 2 * kPad);
    s += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"2\" fill=\"" +
         palette(i < groups.size() ? groups[i] : 0) + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string svg_heatmap(const std::string& title, int rows, int cols,
                        const std::vector<double>& values, double lo, double hi) {
  std::string s = header(title);
  const double cw = (kW - 2 * kPad) / std::max(cols, 1);
  const double ch = (kH - 2 * kPad) / std::max(rows, 1);
  const double span = hi > lo ? hi - lo : 1.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = values.at(static_cast<std::size_t>(r) * cols + c);
      std::string fill = "#cccccc";
      if (std::isfinite(v)) {
        const int k = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp((v - lo) / span, 0.0, 1.0))));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", k, k);
        fill = buf;
      }
      s += "<rect x=\"" + num(kPad + c * cw) + "\" y=\"" + num(kPad + r * ch) + "\" width=\"" +
           num(cw) + "\" height=\"" + num(ch) + "\" fill=\"" + fill + "\"/>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace dmrl
