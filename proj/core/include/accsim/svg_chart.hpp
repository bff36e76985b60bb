#pragma once

#include <string>
#include <utility>
#include <vector>

#include "accsim/trace.hpp"

namespace accsim {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

/// Minimal static line chart (axes, ticks, legend) for plot-ready output.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              int width = 900, int height = 420);

/// Speed-over-time chart for every vehicle in the trace.
std::string render_speed_chart(const PlatoonTrace& trace);

/// Gap-to-predecessor chart for every follower.
std::string render_spacing_chart(const PlatoonTrace& trace);

}  // namespace accsim
