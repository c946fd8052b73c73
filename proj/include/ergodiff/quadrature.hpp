#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace ergodiff {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  std::size_t panels = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Globally adaptive Gauss-Kronrod (7, 15) on [a, b]. Stops when the summed error estimate
/// is below max(abs_tol, rel_tol * |value|) or after max_panels panels.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, std::size_t max_panels = 4000);

/// Integrand given through its logarithm g(u) and slope g'(u).
struct LogIntegrand {
  std::function<double(double)> log_value;
  std::function<double(double)> log_slope;
};

struct LogQuadratureResult {
  double log_value = 0.0;
  double log_error = 0.0;
  bool converged = false;
  std::size_t panels = 0;
  std::size_t linearized_panels = 0;
};

/// log of int_a^b exp(g(u)) du, accumulated with log-sum-exp over panels so the
/// integrand is never materialized. Panels whose exponent is steep and nearly linear
/// toward one endpoint are integrated in closed form from the local linearization
/// g(p) + g'(p)(u - p) with a second-order curvature correction.
LogQuadratureResult log_integrate(const LogIntegrand& integrand, double a, double b, double rel_tol = 1e-10,
                                  std::size_t max_panels = 4000);

}  // namespace ergodiff
