#pragma once

#include <string>
#include <vector>

namespace vempoly {

/// One curve of a log-log plot.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points; // (x, y), strictly positive
  double slope = 0.0;                            // annotated next to the curve
  bool annotate_slope = true;
};

/// Static log-log SVG chart with decade ticks and per-series markers.
/// Output bytes are deterministic for fixed input.
std::string render_loglog_svg(const std::vector<SvgSeries>& series, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel);

} // namespace vempoly
