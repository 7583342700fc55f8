#ifndef BDGM_TOOLS_SVG_HPP
#define BDGM_TOOLS_SVG_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace bdgm::tools {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart: axes with min/max tick labels and one polyline per series.
inline void write_line_svg(const std::filesystem::path& path, const std::vector<Series>& series,
                           const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  constexpr double w = 640, h = 420, left = 60, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (w - left - right); };
  const auto py = [&](double v) { return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ofstream out(path);
  char buf[128];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  std::snprintf(buf, sizeof buf, "%.3g", x0);
  out << "<text x=\"" << left << "\" y=\"" << h - bottom + 16 << "\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", x1);
  out << "<text x=\"" << w - right << "\" y=\"" << h - bottom + 16 << "\" font-size=\"11\" text-anchor=\"end\">" << buf
      << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", y0);
  out << "<text x=\"" << left - 6 << "\" y=\"" << h - bottom << "\" font-size=\"11\" text-anchor=\"end\">" << buf
      << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", y1);
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << buf
      << "</text>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << h / 2
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colors[s % 6] << "\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[k]), py(series[s].y[k]));
      out << buf;
    }
    out << "\"/>\n";
    if (!series[s].label.empty() && series.size() <= 6)
      out << "<text x=\"" << w - right - 4 << "\" y=\"" << top + 14 * (s + 1) << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
          << colors[s % 6] << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bdgm::tools

#endif  // BDGM_TOOLS_SVG_HPP
