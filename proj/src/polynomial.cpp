#include "ergodiff/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ergodiff {

int Monomial::degree() const { return std::accumulate(powers.begin(), powers.end(), 0); }

Polynomial::Polynomial(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("polynomial dimension must be positive");
}

Polynomial::Polynomial(std::size_t dim, std::vector<Monomial> terms) : Polynomial(dim) {
  for (const auto& m : terms) {
    if (m.powers.size() != dim) throw std::invalid_argument("monomial exponent vector has wrong length");
    if (std::any_of(m.powers.begin(), m.powers.end(), [](int p) { return p < 0; }))
      throw std::invalid_argument("monomial exponents must be non-negative");
  }
  terms_ = std::move(terms);
  normalize();
}

Polynomial Polynomial::constant(std::size_t dim, double value) {
  return Polynomial(dim, {Monomial{value, std::vector<int>(dim, 0)}});
}

Polynomial Polynomial::coordinate(std::size_t dim, std::size_t j) {
  std::vector<int> powers(dim, 0);
  powers.at(j) = 1;
  return Polynomial(dim, {Monomial{1.0, std::move(powers)}});
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& m : terms_) d = std::max(d, m.degree());
  return d;
}

void Polynomial::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Monomial& a, const Monomial& b) { return a.powers < b.powers; });
  std::vector<Monomial> merged;
  merged.reserve(terms_.size());
  for (auto& m : terms_) {
    if (!merged.empty() && merged.back().powers == m.powers) {
      merged.back().coeff += m.coeff;
    } else {
      merged.push_back(std::move(m));
    }
  }
  std::erase_if(merged, [](const Monomial& m) { return m.coeff == 0.0; });
  terms_ = std::move(merged);
}

Polynomial Polynomial::derivative(std::size_t j) const {
  if (j >= dim_) throw std::out_of_range("derivative index out of range");
  std::vector<Monomial> out;
  for (const auto& m : terms_) {
    if (m.powers[j] == 0) continue;
    Monomial d = m;
    d.coeff *= m.powers[j];
    d.powers[j] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(dim_, std::move(out));
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(dim_);
  for (std::size_t j = 0; j < dim_; ++j) out += derivative(j).derivative(j);
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.dim_ != dim_) throw std::invalid_argument("polynomial dimension mismatch");
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  normalize();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += rhs * -1.0; }

Polynomial& Polynomial::operator*=(double s) {
  for (auto& m : terms_) m.coeff *= s;
  normalize();
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  if (lhs.dim_ != rhs.dim_) throw std::invalid_argument("polynomial dimension mismatch");
  std::vector<Monomial> out;
  out.reserve(lhs.terms_.size() * rhs.terms_.size());
  for (const auto& a : lhs.terms_) {
    for (const auto& b : rhs.terms_) {
      Monomial m{a.coeff * b.coeff, a.powers};
      for (std::size_t j = 0; j < lhs.dim_; ++j) m.powers[j] += b.powers[j];
      out.push_back(std::move(m));
    }
  }
  return Polynomial(lhs.dim_, std::move(out));
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& m : terms_) {
    if (!first) os << (m.coeff < 0 ? " - " : " + ");
    else if (m.coeff < 0) os << "-";
    first = false;
    const double c = std::abs(m.coeff);
    const bool bare = m.degree() > 0 && c == 1.0;
    if (!bare) os << c;
    bool need_mul = !bare;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (m.powers[j] == 0) continue;
      if (need_mul) os << "*";
      os << "x" << (j + 1);
      if (m.powers[j] > 1) os << "^" << m.powers[j];
      need_mul = true;
    }
  }
  return os.str();
}

}  // namespace ergodiff
