#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace ergodiff {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// log(e^a - e^b) for a >= b; returns kLogZero when a == b.
inline double log_sub_exp(double a, double b) {
  if (b == kLogZero) return a;
  if (b >= a) return kLogZero;
  return a + std::log(-std::expm1(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kLogZero;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kLogZero || !std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

/// exp(x) only where the result is comfortably representable, as a guard for
/// materializing log-domain quantities.
inline bool materializable(double log_value) { return std::abs(log_value) < 300.0; }

}  // namespace ergodiff
