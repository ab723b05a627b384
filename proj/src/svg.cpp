#include <vempoly/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vempoly {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

} // namespace

std::string render_loglog_svg(const std::vector<SvgSeries>& series, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel)
{
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 55;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("render_loglog_svg: points must be positive");
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  if (series.empty() || xmin > xmax) {
    xmin = ymin = -1;
    xmax = ymax = 1;
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double ly) { return height - mb - (ly - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Frame.
  os << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(width - ml - mr)
     << "\" height=\"" << fmt(height - mt - mb)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Decade ticks and gridlines.
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    double x = px(d);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(height - mb) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(height - mb + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" << d
       << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    double y = py(d);
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(width - mr)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << d
       << "</text>\n";
  }
  os << "<text x=\"" << fmt((ml + width - mr) / 2) << "\" y=\"" << fmt(height - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << fmt((mt + height - mb) / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
     << fmt((mt + height - mb) / 2) << ")\">" << ylabel << "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 8];
    std::ostringstream path;
    for (size_t i = 0; i < series[s].points.size(); ++i) {
      double x = px(std::log10(series[s].points[i].first));
      double y = py(std::log10(series[s].points[i].second));
      path << (i == 0 ? "M" : "L") << fmt(x) << " " << fmt(y) << " ";
    }
    os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    for (const auto& [xv, yv] : series[s].points)
      os << "<circle cx=\"" << fmt(px(std::log10(xv))) << "\" cy=\"" << fmt(py(std::log10(yv)))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";

    double lx = ml + 12, ly = mt + 18 + 16 * static_cast<double>(s);
    os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 22)
       << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label;
    if (series[s].annotate_slope) os << " (slope " << fmt(series[s].slope) << ")";
    os << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace vempoly
