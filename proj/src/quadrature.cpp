#include "ergodiff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "ergodiff/log_math.hpp"

namespace ergodiff {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[i] * pair;
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, std::size_t max_panels) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  std::size_t panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.panels = panels;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

namespace {

struct LogPanel {
  double a, b, log_value, log_error;
  bool linearized;
  bool operator<(const LogPanel& o) const { return log_error < o.log_error; }
};

// Closed-form panel when the exponent is steep (|s| (b - a) >= 50) and nearly linear
// over the e-folding length 1/|s| at the dominant endpoint.
bool try_linearized(const LogIntegrand& g, double a, double b, double ga, double gb, LogPanel& out) {
  const bool right_peak = gb >= ga;
  const double p = right_peak ? b : a;
  const double gp = right_peak ? gb : ga;
  if (!std::isfinite(gp)) return false;
  const double s = g.log_slope(p);
  if (!std::isfinite(s) || s == 0.0) return false;
  if (right_peak ? s <= 0.0 : s >= 0.0) return false;
  const double width = b - a;
  const double abs_s = std::abs(s);
  if (abs_s * width < 50.0) return false;
  const double other = right_peak ? ga : gb;
  const double gmid = g.log_value(0.5 * (a + b));
  if (!(other <= gp - 40.0) || !(gmid <= gp - 20.0)) return false;
  const double h = std::min(0.5 * width, 1.0 / abs_s);
  const double inner = right_peak ? p - h : p + h;
  const double curvature = right_peak ? (s - g.log_slope(inner)) / h : (g.log_slope(inner) - s) / h;
  const double c = curvature / (s * s);
  if (!std::isfinite(c) || std::abs(c) > 1e-4) return false;
  out = {a, b, gp - std::log(abs_s) + std::log1p(c), 0.0, true};
  out.log_error = out.log_value + std::log(3.0 * c * c + 1e-15);
  return true;
}

LogPanel log_gk15(const LogIntegrand& g, double a, double b) {
  const double ga = g.log_value(a);
  const double gb = g.log_value(b);
  LogPanel lin{};
  if (try_linearized(g, a, b, ga, gb, lin)) return lin;

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> vals{};
  vals[0] = g.log_value(center);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    vals[1 + 2 * i] = g.log_value(center - dx);
    vals[2 + 2 * i] = g.log_value(center + dx);
  }
  double gmax = kLogZero;
  for (double v : vals) gmax = std::max(gmax, v);
  if (gmax == kLogZero) return {a, b, kLogZero, kLogZero, false};

  auto e = [&](int idx) { return std::exp(vals[static_cast<std::size_t>(idx)] - gmax); };
  double kronrod = kWgk[7] * e(0);
  double gauss = kWg[3] * e(0);
  for (int i = 0; i < 7; ++i) {
    const double pair = e(1 + 2 * i) + e(2 + 2 * i);
    kronrod += kWgk[i] * pair;
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }
  const double log_value = gmax + std::log(kronrod * half);
  const double diff = std::max(std::abs(kronrod - gauss), 1e-15 * kronrod);
  return {a, b, log_value, gmax + std::log(diff * half), false};
}

double total_log(const std::vector<LogPanel>& panels, bool errors) {
  std::vector<double> xs;
  xs.reserve(panels.size());
  for (const auto& p : panels) xs.push_back(errors ? p.log_error : p.log_value);
  return log_sum_exp(xs);
}

}  // namespace

LogQuadratureResult log_integrate(const LogIntegrand& integrand, double a, double b, double rel_tol,
                                  std::size_t max_panels) {
  LogQuadratureResult out;
  if (!(b > a)) {
    out.log_value = kLogZero;
    out.log_error = kLogZero;
    out.converged = b == a;
    return out;
  }
  std::vector<LogPanel> heap{log_gk15(integrand, a, b)};
  const double log_tol = std::log(rel_tol);
  for (;;) {
    const double value = total_log(heap, false);
    const double error = total_log(heap, true);
    const bool done = value == kLogZero ? error == kLogZero : error <= value + log_tol;
    if (done || heap.size() >= max_panels) {
      out.log_value = value;
      out.log_error = error;
      out.converged = done;
      break;
    }
    std::pop_heap(heap.begin(), heap.end());
    const LogPanel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in double precision.
      out.log_value = value;
      out.log_error = error;
      out.converged = false;
      heap.push_back(worst);
      break;
    }
    heap.push_back(log_gk15(integrand, worst.a, mid));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(log_gk15(integrand, mid, worst.b));
    std::push_heap(heap.begin(), heap.end());
  }
  out.panels = heap.size();
  out.linearized_panels =
      static_cast<std::size_t>(std::count_if(heap.begin(), heap.end(), [](const LogPanel& p) { return p.linearized; }));
  return out;
}

}  // namespace ergodiff
