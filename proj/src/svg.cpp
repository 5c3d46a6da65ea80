#include "matchfn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matchfn {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string LineChart::render() const {
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  int t_lo = std::numeric_limits<int>::max(), t_hi = std::numeric_limits<int>::min();
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : series) {
    for (const auto& [m, v] : s.points) {
      t_lo = std::min(t_lo, m.index());
      t_hi = std::max(t_hi, m.index());
      if (v && std::isfinite(*v)) {
        y_lo = std::min(y_lo, *v);
        y_hi = std::max(y_hi, *v);
      }
    }
  }
  if (t_lo > t_hi) {
    t_lo = 0;
    t_hi = 1;
  }
  if (!(y_lo < y_hi)) {
    y_lo = std::isfinite(y_lo) ? y_lo - 1 : 0;
    y_hi = y_lo + 2;
  }
  double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  auto sx = [&](int idx) {
    return t_hi == t_lo ? ml + pw / 2
                        : ml + pw * (idx - t_lo) / static_cast<double>(t_hi - t_lo);
  };
  auto sy = [&](double v) { return mt + ph * (1.0 - (v - y_lo) / (y_hi - y_lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
      << height << "' viewBox='0 0 " << width << " " << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16' "
         "font-family='sans-serif'>" << title << "</text>\n";
  svg << "<text x='16' y='" << mt + ph / 2
      << "' text-anchor='middle' font-size='12' font-family='sans-serif' transform='rotate(-90 16 "
      << mt + ph / 2 << ")'>" << y_label << "</text>\n";

  // axes
  svg << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='"
      << mt + ph << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = y_lo + (y_hi - y_lo) * k / 4.0;
    double y = sy(v);
    svg << "<line x1='" << ml - 4 << "' y1='" << y << "' x2='" << ml << "' y2='" << y
        << "' stroke='black'/>\n";
    svg << "<text x='" << ml - 8 << "' y='" << y + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << fmt(v)
        << "</text>\n";
  }
  int n_ticks = std::min(6, t_hi - t_lo + 1);
  for (int k = 0; k < n_ticks; ++k) {
    int idx = t_lo + (t_hi - t_lo) * k / std::max(1, n_ticks - 1);
    double x = sx(idx);
    svg << "<line x1='" << x << "' y1='" << mt + ph << "' x2='" << x << "' y2='"
        << mt + ph + 4 << "' stroke='black'/>\n";
    svg << "<text x='" << x << "' y='" << mt + ph + 18
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
        << Month::from_index(idx).str() << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream path;
    bool pen_down = false;
    for (const auto& [m, v] : series[s].points) {
      if (!v || !std::isfinite(*v)) {
        pen_down = false;  // gap in the line
        continue;
      }
      path << (pen_down ? " L " : " M ") << fmt(sx(m.index())) << ' ' << fmt(sy(*v));
      pen_down = true;
    }
    svg << "<path d='" << path.str() << "' fill='none' stroke='" << color
        << "' stroke-width='1.5'/>\n";
    svg << "<text x='" << ml + pw - 4 << "' y='" << mt + 14 + 14 * s
        << "' text-anchor='end' font-size='11' font-family='sans-serif' fill='" << color
        << "'>" << series[s].name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace matchfn
