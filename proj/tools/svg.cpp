#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tpx/error.hpp"

namespace tpxcli {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;
};

// Pads the range and picks a 1/2/5 tick step, so grids land on round values.
Axis nice_axis(double lo, double hi) {
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double raw_step = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    step = mult * mag;
    if (step >= raw_step) break;
  }
  return Axis{std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string pareto_svg(const std::vector<tpx::EvaluatedProfile>& all,
                       const std::vector<tpx::EvaluatedProfile>& front,
                       const std::string& quality_label) {
  if (all.empty()) throw tpx::ConfigError("nothing to plot: no evaluated profiles");

  double min_x = all.front().bdr, max_x = all.front().bdr;
  double min_y = all.front().objective, max_y = all.front().objective;
  for (const auto& ep : all) {
    min_x = std::min(min_x, ep.bdr);
    max_x = std::max(max_x, ep.bdr);
    min_y = std::min(min_y, ep.objective);
    max_y = std::max(max_y, ep.objective);
  }
  const Axis ax = nice_axis(min_x, max_x);
  const Axis ay = nice_axis(min_y, max_y);

  constexpr double kW = 640, kH = 480, kL = 70, kR = 20, kT = 20, kB = 55;
  const auto px = [&](double x) { return kL + (x - ax.lo) / (ax.hi - ax.lo) * (kW - kL - kR); };
  const auto py = [&](double y) { return kH - kB - (y - ay.lo) / (ay.hi - ay.lo) * (kH - kT - kB); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";

  for (double x = ax.lo; x <= ax.hi + 1e-9; x += ax.step) {
    svg += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(kT) + "\" x2=\"" + fmt(px(x)) +
           "\" y2=\"" + fmt(kH - kB) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(kH - kB + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">" + fmt(x) + "</text>\n";
  }
  for (double y = ay.lo; y <= ay.hi + 1e-9; y += ay.step) {
    svg += "<line x1=\"" + fmt(kL) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(kW - kR) +
           "\" y2=\"" + fmt(py(y)) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + fmt(kL - 6) + "\" y=\"" + fmt(py(y) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">" + fmt(y) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(kL) + "\" y=\"" + fmt(kT) + "\" width=\"" + fmt(kW - kL - kR) +
         "\" height=\"" + fmt(kH - kT - kB) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg += "<text x=\"" + fmt((kL + kW - kR) / 2) + "\" y=\"" + fmt(kH - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#000\">BD-Rate (" + quality_label +
         ") [%]</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt((kT + kH - kB) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#000\" transform=\"rotate(-90 16 " +
         fmt((kT + kH - kB) / 2) + ")\">BD-DE (" + quality_label + ") [%]</text>\n";

  for (const auto& ep : all)
    svg += "<circle cx=\"" + fmt(px(ep.bdr)) + "\" cy=\"" + fmt(py(ep.objective)) +
           "\" r=\"2.5\" fill=\"#9999bb\" fill-opacity=\"0.7\"/>\n";

  if (!front.empty()) {
    std::string path = "M";
    for (std::size_t i = 0; i < front.size(); ++i) {
      if (i > 0) path += " L";
      path += fmt(px(front[i].bdr)) + " " + fmt(py(front[i].objective));
    }
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    for (const auto& ep : front)
      svg += "<circle cx=\"" + fmt(px(ep.bdr)) + "\" cy=\"" + fmt(py(ep.objective)) +
             "\" r=\"4\" fill=\"#c0392b\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tpxcli
