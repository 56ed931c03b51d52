#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "echolab/errors.hpp"

namespace echolab::cli {

namespace {

constexpr double kW = 860, kH = 520;
constexpr double kL = 70, kR = 20, kT = 36, kB = 48;  // margins

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double pix_lo, double pix_hi) const {
    const double x = log ? std::log10(v) : v;
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    return pix_lo + (x - a) / (b - a) * (pix_hi - pix_lo);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Svg {
  std::ofstream out;
  Axis xa, ya;

  explicit Svg(const std::string& path) : out(path) {
    if (!out) fail(ErrorCode::format, "emit_plot: cannot write " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
        << "' viewBox='0 0 " << kW << " " << kH << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
  }
  double px(double v) const { return xa.map(v, kL, kW - kR); }
  double py(double v) const { return ya.map(v, kH - kB, kT); }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    out << "<rect x='" << kL << "' y='" << kT << "' width='" << (kW - kL - kR) << "' height='"
        << (kH - kT - kB) << "' fill='none' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = i / 5.0;
      const double xv = xa.log ? std::pow(10.0, std::log10(xa.lo) +
                                                    fx * (std::log10(xa.hi) - std::log10(xa.lo)))
                               : xa.lo + fx * (xa.hi - xa.lo);
      const double yv = ya.log ? std::pow(10.0, std::log10(ya.lo) +
                                                    fx * (std::log10(ya.hi) - std::log10(ya.lo)))
                               : ya.lo + fx * (ya.hi - ya.lo);
      out << "<line x1='" << px(xv) << "' y1='" << kH - kB << "' x2='" << px(xv) << "' y2='"
          << kH - kB + 5 << "' stroke='black'/>\n"
          << "<text x='" << px(xv) << "' y='" << kH - kB + 20
          << "' font-size='12' text-anchor='middle'>" << num(xv) << "</text>\n"
          << "<line x1='" << kL - 5 << "' y1='" << py(yv) << "' x2='" << kL << "' y2='" << py(yv)
          << "' stroke='black'/>\n"
          << "<text x='" << kL - 8 << "' y='" << py(yv) + 4
          << "' font-size='12' text-anchor='end'>" << num(yv) << "</text>\n";
    }
    out << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 10
        << "' font-size='14' text-anchor='middle'>" << xlabel << "</text>\n"
        << "<text x='18' y='" << (kT + kH - kB) / 2
        << "' font-size='14' text-anchor='middle' transform='rotate(-90 18 "
        << (kT + kH - kB) / 2 << ")'>" << ylabel << "</text>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color) {
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.3' points='";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(ys[i])) continue;
      out << px(xs[i]) << "," << py(std::clamp(ys[i], ya.lo, ya.hi)) << " ";
    }
    out << "'/>\n";
  }

  void dots(const std::vector<double>& xs, const std::vector<double>& ys,
            const std::string& color) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i]) << "' r='3.5' fill='" << color
          << "'/>\n";
  }

  void legend(int slot, const std::string& label, const std::string& color) {
    const double y = kT + 18 + 18 * slot;
    out << "<line x1='" << kW - kR - 170 << "' y1='" << y << "' x2='" << kW - kR - 140
        << "' y2='" << y << "' stroke='" << color << "' stroke-width='2.5'/>\n"
        << "<text x='" << kW - kR - 132 << "' y='" << y + 4 << "' font-size='13'>" << label
        << "</text>\n";
  }

  void title(const std::string& text) {
    out << "<text x='" << kW / 2 << "' y='22' font-size='16' text-anchor='middle'>" << text
        << "</text>\n";
  }

  void vspan(double x0, double x1, const std::string& color) {
    out << "<rect x='" << px(x0) << "' y='" << kT << "' width='" << (px(x1) - px(x0))
        << "' height='" << (kH - kT - kB) << "' fill='" << color << "' opacity='0.18'/>\n";
  }

  void vline(double x, const std::string& color, const std::string& label) {
    out << "<line x1='" << px(x) << "' y1='" << kT << "' x2='" << px(x) << "' y2='" << kH - kB
        << "' stroke='" << color << "' stroke-dasharray='6 4'/>\n"
        << "<text x='" << px(x) - 4 << "' y='" << kT + 14
        << "' font-size='12' text-anchor='end' fill='" << color << "'>" << label << "</text>\n";
  }

  void close() { out << "</svg>\n"; }
};

std::vector<double> column(const Table& t, const std::string& name) {
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c] == name) {
      std::vector<double> v(t.rows.size());
      for (std::size_t r = 0; r < t.rows.size(); ++r) v[r] = t.rows[r][c];
      return v;
    }
  fail(ErrorCode::format, "emit_plot: table has no column '" + name + "'");
}

std::pair<double, double> finite_range(const std::vector<double>& v, bool positive_only) {
  double lo = 1e300, hi = -1e300;
  for (double x : v) {
    if (!std::isfinite(x) || (positive_only && x <= 0.0)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo > hi) fail(ErrorCode::format, "emit_plot: no finite data to plot");
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

}  // namespace

void emit_plot(const Table& t, const std::string& kind, const std::string& svg_path) {
  Svg svg(svg_path);
  if (kind == "rho") {
    const auto ts = column(t, "t");
    const auto rho = column(t, "rho_exact");
    const auto pois = column(t, "rho_poisson");
    svg.xa = {*std::min_element(ts.begin(), ts.end()), *std::max_element(ts.begin(), ts.end()),
              false};
    svg.ya = {0.0, 1.05, false};
    // collapse-window shading and revival-peak marker from the header block
    double t_cl = 0.0, peak_index = 0.0;
    for (const auto& [k, v] : t.annotations) {
      if (k == "collapse-window") {
        const auto sp = v.find(' ');
        svg.vspan(std::stod(v.substr(0, sp)), std::stod(v.substr(sp + 1)), "orange");
      }
      if (k == "t_cl") t_cl = std::stod(v);
      if (k == "revival-peak-index") peak_index = std::stod(v);
    }
    if (t_cl > 0.0 && peak_index > 0.0) {
      const double t_peak = peak_index * t_cl;
      if (t_peak >= svg.xa.lo && t_peak <= svg.xa.hi) svg.vline(t_peak, "seagreen", "revival");
    }
    svg.axes("t", "rho(t)");
    svg.polyline(ts, rho, "steelblue");
    svg.polyline(ts, pois, "crimson");
    svg.legend(0, "exact sum", "steelblue");
    svg.legend(1, "poisson a2", "crimson");
    svg.title("return probability");
  } else if (kind == "fidelity") {
    const auto ts = column(t, "t");
    const bool is_return = std::any_of(t.columns.begin(), t.columns.end(),
                                       [](const std::string& c) { return c == "r_semi"; });
    const auto semi = column(t, is_return ? "r_semi" : "f_semi");
    const auto exact = column(t, is_return ? "r_exact" : "f_exact");
    svg.xa = {*std::min_element(ts.begin(), ts.end()), *std::max_element(ts.begin(), ts.end()),
              false};
    svg.ya = {0.0, 1.05, false};
    svg.axes("t", is_return ? "r(t)" : "f(t)");
    svg.polyline(ts, semi, "steelblue");
    svg.polyline(ts, exact, "crimson");
    svg.legend(0, "semiclassical", "steelblue");
    svg.legend(1, "grid oracle", "crimson");
    svg.title(is_return ? "return amplitude" : "quantum fidelity");
  } else if (kind == "convergence") {
    const auto hb = column(t, "hbar");
    const auto err = column(t, "max_err");
    const auto [xlo, xhi] = finite_range(hb, true);
    const auto [ylo, yhi] = finite_range(err, true);
    svg.xa = {xlo / 1.3, xhi * 1.3, true};
    svg.ya = {ylo / 2.0, yhi * 2.0, true};
    svg.axes("hbar", "max |f_semi - f_exact|");
    svg.dots(hb, err, "steelblue");
    // least-squares line in log-log coordinates
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < hb.size(); ++i) {
      const double lx = std::log10(hb[i]), ly = std::log10(err[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(hb.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    std::vector<double> fx{xlo, xhi}, fy;
    for (double x : fx) fy.push_back(std::pow(10.0, icept + slope * std::log10(x)));
    svg.polyline(fx, fy, "crimson");
    svg.legend(0, "measured", "steelblue");
    svg.legend(1, "fit, slope " + num(slope), "crimson");
    svg.title("semiclassical error vs hbar");
  } else {
    fail(ErrorCode::validation, "emit_plot: unknown kind '" + kind + "'");
  }
  svg.close();
}

}  // namespace echolab::cli
