#include "sgrowth/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sgrowth/dataio.hpp"
#include "sgrowth/growth_model.hpp"

namespace sgrowth::plot {

namespace {

constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 80.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string tick_label(double v, double step) {
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < 0.5 * step * 1e-6 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double step = 1.0;
  [[nodiscard]] bool valid() const { return lo <= hi; }
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Expands to whole tick steps; non-negative data keep a zero baseline.
  void finish(bool zero_based) {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
    }
    if (zero_based && lo >= 0.0) lo = 0.0;
    if (hi == lo) hi = lo + 1.0;
    step = nice_step(hi - lo, 5);
    lo = std::floor(lo / step + 1e-9) * step;
    hi = std::ceil(hi / step - 1e-9) * step;
  }
};

template <typename F>
Series curve(std::string label, Years years, Axis axis, F&& f) {
  Series s;
  s.label = std::move(label);
  s.axis = axis;
  for (int t = years.first; t <= years.second; ++t) {
    s.x.push_back(t);
    s.y.push_back(f(static_cast<double>(t)));
  }
  return s;
}

}  // namespace

std::string render_svg(const Figure& fig) {
  const bool has_right = std::any_of(fig.series.begin(), fig.series.end(),
                                     [](const Series& s) { return s.axis == Axis::Right; });
  Range xr, yl, yr;
  for (const auto& s : fig.series) {
    for (double x : s.x) xr.include(x);
    for (double y : s.y) (s.axis == Axis::Left ? yl : yr).include(y);
  }
  xr.finish(false);
  yl.finish(true);
  yr.finish(true);

  const double x0 = kMarginLeft;
  const double x1 = fig.width - (has_right ? kMarginRight : 30.0);
  const double y0 = fig.height - kMarginBottom;
  const double y1 = kMarginTop;
  auto px = [&](double x) { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
  auto py = [&](const Range& r, double y) { return y0 - (y - r.lo) / (r.hi - r.lo) * (y0 - y1); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(fig.width) << "\" height=\""
    << num(fig.height) << "\" viewBox=\"0 0 " << num(fig.width) << ' ' << num(fig.height)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!fig.title.empty()) {
    o << "<text x=\"" << num(fig.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(fig.title) << "</text>\n";
  }

  // Frame, ticks and grid.
  o << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
    << "\" height=\"" << num(y0 - y1) << "\"/>\n";
  o << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  for (double x = xr.lo; x <= xr.hi + 1e-9 * xr.step; x += xr.step) {
    o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px(x))
      << "\" y2=\"" << num(y0 + 5) << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(px(x)) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
      << tick_label(x, xr.step) << "</text>\n";
  }
  for (double y = yl.lo; y <= yl.hi + 1e-9 * yl.step; y += yl.step) {
    o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(py(yl, y)) << "\" x2=\"" << num(x1)
      << "\" y2=\"" << num(py(yl, y)) << "\" stroke=\"#dddddd\"/>"
      << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py(yl, y) + 4) << "\" text-anchor=\"end\">"
      << tick_label(y, yl.step) << "</text>\n";
  }
  if (has_right) {
    for (double y = yr.lo; y <= yr.hi + 1e-9 * yr.step; y += yr.step) {
      o << "<line x1=\"" << num(x1) << "\" y1=\"" << num(py(yr, y)) << "\" x2=\"" << num(x1 + 5)
        << "\" y2=\"" << num(py(yr, y)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << num(x1 + 8) << "\" y=\"" << num(py(yr, y) + 4) << "\">"
        << tick_label(y, yr.step) << "</text>\n";
    }
  }
  o << "</g>\n";
  if (!fig.x_label.empty()) {
    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(fig.height - 15)
      << "\" text-anchor=\"middle\">" << escape(fig.x_label) << "</text>\n";
  }
  if (!fig.left_label.empty()) {
    o << "<text transform=\"translate(20 " << num((y0 + y1) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(fig.left_label) << "</text>\n";
  }
  if (has_right && !fig.right_label.empty()) {
    o << "<text transform=\"translate(" << num(fig.width - 20) << ' ' << num((y0 + y1) / 2)
      << ") rotate(90)\" text-anchor=\"middle\">" << escape(fig.right_label) << "</text>\n";
  }

  // Data.
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const auto& s = fig.series[i];
    const auto& r = s.axis == Axis::Left ? yl : yr;
    const std::string color = s.color.empty() ? kPalette[i % std::size(kPalette)] : s.color;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.mark == Mark::Line) {
      o << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < n; ++k) {
        if (k) o << ' ';
        o << num(px(s.x[k])) << ',' << num(py(r, s.y[k]));
      }
      o << "\"><title>" << escape(s.label) << "</title></polyline>\n";
    } else {
      o << "<g class=\"data\" fill=\"none\" stroke=\"" << color << "\"><title>" << escape(s.label)
        << "</title>\n";
      for (std::size_t k = 0; k < n; ++k) {
        o << "<circle cx=\"" << num(px(s.x[k])) << "\" cy=\"" << num(py(r, s.y[k]))
          << "\" r=\"3\"/>\n";
      }
      o << "</g>\n";
    }
  }

  // Legend.
  o << "<g class=\"legend\" font-size=\"11\">\n";
  double ly = y1 + 16;
  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const auto& s = fig.series[i];
    const std::string color = s.color.empty() ? kPalette[i % std::size(kPalette)] : s.color;
    const double lx = x0 + 10;
    if (s.mark == Mark::Line) {
      o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 20)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>";
    } else {
      o << "<circle cx=\"" << num(lx + 10) << "\" cy=\"" << num(ly - 4) << "\" r=\"3\" fill=\"none\" stroke=\""
        << color << "\"/>";
    }
    o << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
      << (has_right ? (s.axis == Axis::Left ? " (left)" : " (right)") : "") << "</text>\n";
    ly += 15;
  }
  for (const auto& note : fig.notes) {
    o << "<text x=\"" << num(x0 + 10) << "\" y=\"" << num(ly) << "\">" << escape(note) << "</text>\n";
    ly += 15;
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const Figure& fig) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << render_svg(fig);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Series data_series(const AnnualSeries& s, std::string label, Axis axis, double scale) {
  Series out;
  out.label = std::move(label);
  out.mark = Mark::Points;
  out.axis = axis;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.x.push_back(s.years()[i]);
    out.y.push_back(scale * s.values()(static_cast<Eigen::Index>(i)));
  }
  return out;
}

Figure working_time_figure(const NationParams& n, const ModelConstants& c, Years years) {
  Figure fig;
  fig.title = "Working time and industrial evolution";
  fig.x_label = "year";
  fig.left_label = "working time [hours per week]";
  fig.right_label = "GDP per capita [1000 US$ of 1991]";
  fig.series.push_back(curve("working time, " + n.name, years, Axis::Left, [&](double t) {
    return kHoursPerWeekAtFullTime * working_time_path(t, n, c);
  }));
  fig.series.push_back(curve("industrial evolution a(t)", years, Axis::Right,
                             [&](double t) { return evolution(t, c) / 1000.0; }));
  return fig;
}

Figure time_shift_figure(const NationParams& n, const ModelConstants& c, Years years) {
  Figure fig;
  fig.title = "Time shifts between GDP and physical capital";
  fig.x_label = "year";
  fig.left_label = "1000 US$ of 1991 per capita";
  const double amp = n.mu_bar * c.G / 1000.0;
  const auto r = RecoveryCurve::from(n, c);
  fig.series.push_back(curve("evolution GDP, scaled", years, Axis::Left,
                             [&](double t) { return amp * evolution(t, c); }));
  fig.series.push_back(curve("evolution capital", years, Axis::Left, [&](double t) {
    return evolution_capital(t, n.mu_bar, c) / 1000.0;
  }));
  fig.series.push_back(curve(n.name + " GDP, scaled", years, Axis::Left,
                             [&](double t) { return amp * national_gdp(t, r); }));
  fig.series.push_back(curve(n.name + " capital", years, Axis::Left,
                             [&](double t) { return capital(t, n, c) / 1000.0; }));
  char buf[96];
  std::snprintf(buf, sizeof buf, "evolution shift %.2f yr, recovery shift %.2f yr", delta_T(c),
                delta_tau(n.beta, c));
  fig.notes.emplace_back(buf);
  return fig;
}

Figure recoveries_figure(const std::vector<NationParams>& nations, const ModelConstants& c,
                         Years years) {
  Figure fig;
  fig.title = "National recoveries and life expectancy";
  fig.x_label = "year";
  fig.left_label = "life expectancy [years]";
  fig.right_label = "GDP per capita [1000 US$ of 1991]";
  fig.series.push_back(curve("life expectancy L(t)", years, Axis::Left,
                             [&](double t) { return life_expectancy(t, c); }));
  fig.series.push_back(curve("industrial evolution a(t)", years, Axis::Right,
                             [&](double t) { return evolution(t, c) / 1000.0; }));
  for (const auto& n : nations) {
    const auto r = RecoveryCurve::from(n, c);
    fig.series.push_back(curve(n.name, years, Axis::Right,
                               [&](double t) { return national_gdp(t, r) / 1000.0; }));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "halftime shift T - T_L = %.0f yr", c.T - c.T_L);
  fig.notes.emplace_back(buf);
  return fig;
}

}  // namespace sgrowth::plot
