#include "accsim/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace accsim {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Round a raw tick spacing to a pleasant 1/2/5 multiple.
double nice_step(double range, int ticks) {
  if (range <= 0.0) return 1.0;
  const double raw = range / std::max(1, ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series, int width,
                              int height) {
  const int ml = 64, mr = 150, mt = 36, mb = 46;  // margins, legend on the right
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const SvgSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
  }
  if (!(x0 < x1)) { x0 = 0.0; x1 = 1.0; }
  if (!(y0 < y1)) { y0 -= 0.5; y1 += 0.5; }
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;

  const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         title + "</text>\n";

  // Gridlines and tick labels.
  const double xs = nice_step(x1 - x0, 8), ys = nice_step(y1 - y0, 6);
  for (double x = std::ceil(x0 / xs) * xs; x <= x1 + 1e-9; x += xs) {
    svg += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(px(x)) +
           "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(mt + ph + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + fmt(x) + "</text>\n";
  }
  for (double y = std::ceil(y0 / ys) * ys; y <= y1 + 1e-9; y += ys) {
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(ml + pw) +
           "\" y2=\"" + fmt(py(y)) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py(y) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt(y) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
         "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#404040\"/>\n";
  svg += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 8) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(mt + ph / 2) + "\" text-anchor=\"middle\" font-size=\"12\" " +
         "transform=\"rotate(-90 16 " + fmt(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  // Series polylines, decimated to keep files small.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const SvgSeries& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    const std::size_t stride = std::max<std::size_t>(1, s.points.size() / 1500);
    std::string pts;
    for (std::size_t k = 0; k < s.points.size(); k += stride) {
      pts += fmt(px(s.points[k].first)) + "," + fmt(py(s.points[k].second)) + " ";
    }
    if (!s.points.empty() && (s.points.size() - 1) % stride != 0) {
      pts += fmt(px(s.points.back().first)) + "," + fmt(py(s.points.back().second));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.4\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 14.0 + 16.0 * i;
    svg += "<line x1=\"" + fmt(ml + pw + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
           fmt(ml + pw + 34) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(ml + pw + 38) + "\" y=\"" + fmt(ly + 4) +
           "\" font-size=\"11\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_speed_chart(const PlatoonTrace& trace) {
  std::vector<SvgSeries> series(trace.vehicle_count);
  for (int v = 0; v < trace.vehicle_count; ++v) {
    series[v].label = v == 0 ? "lead" : "follower " + std::to_string(v);
    series[v].points.reserve(trace.tick_count());
  }
  for (int tick = 0; tick < trace.tick_count(); ++tick) {
    for (int v = 0; v < trace.vehicle_count; ++v) {
      const TickRecord& r = trace.at(tick, v);
      series[v].points.emplace_back(r.t, r.state.v);
    }
  }
  return render_line_chart("platoon speeds", "time [s]", "speed [m/s]", series);
}

std::string render_spacing_chart(const PlatoonTrace& trace) {
  std::vector<SvgSeries> series;
  for (int v = 1; v < trace.vehicle_count; ++v) {
    SvgSeries s;
    s.label = "gap " + std::to_string(v - 1) + "-" + std::to_string(v);
    s.points.reserve(trace.tick_count());
    for (int tick = 0; tick < trace.tick_count(); ++tick) {
      s.points.emplace_back(trace.at(tick, v).t,
                            trace.at(tick, v - 1).state.x - trace.at(tick, v).state.x);
    }
    series.push_back(std::move(s));
  }
  return render_line_chart("gaps to predecessor", "time [s]", "spacing [m]", series);
}

}  // namespace accsim
