#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace maiter_cli {

/// Minimal static SVG writer: fixed canvas, labeled polylines.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add_series(const std::string& name, const std::string& color,
                  std::vector<std::pair<double, double>> pts) {
    series_.push_back({name, color, std::move(pts)});
  }

  bool write(const std::string& path) const {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series_)
      for (const auto& [x, y] : s.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    if (x0 > x1 || y0 > y1) return false;
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;

    const double W = 720, H = 440, ml = 70, mr = 20, mt = 40, mb = 50;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) return false;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>"
        << title_ << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='"
        << H - mb << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = x0 + (x1 - x0) * t / 4, yv = y0 + (y1 - y0) * t / 4;
      out << "<text x='" << px(xv) << "' y='" << H - mb + 18
          << "' text-anchor='middle' font-size='11'>" << format(xv) << "</text>\n";
      out << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
          << "' text-anchor='end' font-size='11'>" << format(yv) << "</text>\n";
    }
    out << "<text x='" << W / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-size='13'>" << xlabel_ << "</text>\n";
    out << "<text x='18' y='" << H / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 " << H / 2
        << ")'>" << ylabel_ << "</text>\n";
    double ly = mt + 8;
    for (const auto& s : series_) {
      out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
      for (const auto& [x, y] : s.pts)
        if (std::isfinite(x) && std::isfinite(y)) out << px(x) << "," << py(y) << " ";
      out << "'/>\n";
      out << "<text x='" << W - mr - 8 << "' y='" << ly
          << "' text-anchor='end' font-size='12' fill='" << s.color << "'>" << s.name
          << "</text>\n";
      ly += 16;
    }
    out << "</svg>\n";
    return true;
  }

 private:
  struct Series {
    std::string name, color;
    std::vector<std::pair<double, double>> pts;
  };

  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
  }

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace maiter_cli
