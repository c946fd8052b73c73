#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ergodiff {

/// A single term coeff * x_1^p_1 * ... * x_d^p_d.
struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;

  int degree() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Multivariate polynomial over R^d in canonical form: terms sorted by
/// exponent vector, duplicates merged, zero coefficients dropped.
class Polynomial {
 public:
  explicit Polynomial(std::size_t dim = 1);
  Polynomial(std::size_t dim, std::vector<Monomial> terms);

  static Polynomial constant(std::size_t dim, double value);
  /// The coordinate function x_j (0-based).
  static Polynomial coordinate(std::size_t dim, std::size_t j);

  std::size_t dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  /// Exact term-wise power-rule derivative with respect to x_j.
  Polynomial derivative(std::size_t j) const;
  Polynomial laplacian() const;

  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& x) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const;

 private:
  void normalize();

  std::size_t dim_;
  std::vector<Monomial> terms_;
};

template <typename Derived>
typename Derived::Scalar Polynomial::operator()(const Eigen::MatrixBase<Derived>& x) const {
  using Scalar = typename Derived::Scalar;
  Scalar sum(0);
  for (const auto& m : terms_) {
    Scalar term(m.coeff);
    for (std::size_t j = 0; j < dim_; ++j) {
      for (int p = 0; p < m.powers[j]; ++p) term *= x(static_cast<Eigen::Index>(j));
    }
    sum += term;
  }
  return sum;
}

}  // namespace ergodiff
