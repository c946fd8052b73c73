#include "ergodiff/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ergodiff {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,x1,x2\n";
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    os << format_double(trajectory.times[i]) << ',' << format_double(trajectory.states[i](0)) << ','
       << format_double(trajectory.states[i](1)) << '\n';
  }
}

void write_series_csv(std::ostream& os, const std::vector<ErgodicSeries>& series) {
  os << "T,f_T,seed,start_x1,start_x2,center_x1,center_x2\n";
  for (const auto& s : series) {
    const std::string tail = ',' + std::to_string(s.seed) + ',' + format_double(s.start(0)) + ',' +
                             format_double(s.start(1)) + ',' + format_double(s.f.center(0)) + ',' +
                             format_double(s.f.center(1)) + '\n';
    for (std::size_t i = 0; i < s.times.size(); ++i)
      os << format_double(s.times[i]) << ',' << format_double(s.averages[i]) << tail;
  }
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / std::max(target, 1);
  int exponent = static_cast<int>(std::floor(std::log10(raw)));
  int mantissa = 10;
  for (int m : {1, 2, 5}) {
    if (m * std::pow(10.0, exponent) >= raw) {
      mantissa = m;
      break;
    }
  }
  if (mantissa == 10) mantissa = 1, ++exponent;
  // Tick k sits at k * mantissa * 10^exponent; dividing by an exact power of ten keeps
  // labels like 0.6 exact.
  const double scale = std::pow(10.0, std::abs(exponent));
  auto at = [&](long long k) {
    const double units = static_cast<double>(k * mantissa);
    return exponent >= 0 ? units * scale : units / scale;
  };
  const double step = at(1);
  const auto first = static_cast<long long>(std::floor(lo / step + 1e-9));
  const auto last = static_cast<long long>(std::ceil(hi / step - 1e-9));
  std::vector<double> ticks;
  for (long long k = first; k <= last; ++k) ticks.push_back(at(k));
  return ticks;
}

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 70;
constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%g", v);
  return buf.data();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = 0.0, y_hi = 0.0;
  for (const auto& line : chart.lines) {
    for (const auto& [x, y] : line) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  x_lo = std::min(x_lo, 0.0);
  const auto xt = nice_ticks(x_lo, x_hi);
  const auto yt = nice_ticks(y_lo, y_hi > y_lo ? y_hi : y_lo + 1.0);
  const double x0 = xt.front(), x1 = xt.back(), y0 = yt.front(), y1 = yt.back();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << escape(chart.title) << "</text>\n";
  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : xt)
    os << "<line x1=\"" << fixed(px(t)) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(px(t)) << "\" y2=\""
       << fixed(kTop + ph) << "\"/>\n";
  for (double t : yt)
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(t)) << "\" x2=\"" << fixed(kLeft + pw)
       << "\" y2=\"" << fixed(py(t)) << "\"/>\n";
  os << "</g>\n";
  os << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
     << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double t : xt)
    os << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(kTop + ph + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  for (double t : yt)
    os << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(t) + 4) << "\" text-anchor=\"end\">"
       << tick_label(t) << "</text>\n";
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 20)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.x_label) << "</text>\n";
  os << "<text x=\"20\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
     << fixed(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";
  os << "</g>\n";
  for (std::size_t i = 0; i < chart.lines.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[i % kPalette.size()] << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : chart.lines[i]) {
      if (!first) os << ' ';
      first = false;
      os << fixed(px(x)) << ',' << fixed(py(y));
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ergodiff
