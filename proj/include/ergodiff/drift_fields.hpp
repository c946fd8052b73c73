#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ergodiff/polynomial.hpp"

namespace ergodiff {

/// Polynomial drift b: R^d -> R^d, component k stored as b_k.
class PolyDriftField {
 public:
  PolyDriftField(std::vector<Polynomial> components, std::string name);

  static PolyDriftField zero(std::size_t dim, std::string name = "zero");

  std::size_t dim() const { return components_.size(); }
  const std::string& name() const { return name_; }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& component(std::size_t k) const { return components_.at(k); }

  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> eval(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < dim(); ++k) out(static_cast<Eigen::Index>(k)) = components_[k](x);
    return out;
  }

  friend bool operator==(const PolyDriftField&, const PolyDriftField&) = default;

 private:
  std::vector<Polynomial> components_;
  std::string name_;
};

/// Row k, column j holds d b_k / d x_j.
using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// b = -(d/dz) z^4 written in real coordinates z = x1 + i x2.
PolyDriftField make_z4_field();

/// -(d/dz) z^n for integer n >= 1; degree n-1 drift derived from a holomorphic potential.
PolyDriftField make_holomorphic_power_field(int n);

/// b = -grad V for a polynomial potential V.
PolyDriftField make_gradient_field(const Polynomial& potential, std::string name);

PolyMatrix jacobian(const PolyDriftField& field);

/// Laplacian of component k (0-based).
Polynomial laplacian_component(const PolyDriftField& field, std::size_t k);

/// d b_2/d x_1 - d b_1/d x_2; only defined for planar fields.
Polynomial curl2d(const PolyDriftField& field);

/// 2 * sum_i x_i b_i(x).
template <typename Field, typename Derived>
double c_function(const Field& field, const Eigen::MatrixBase<Derived>& x) {
  return 2.0 * x.dot(field.eval(x));
}

struct RadialDiagnostics {
  double radius = 0.0;
  double angle = 0.0;
  double radial_component = 0.0;
};

/// e_r . b at x = (r cos phi, r sin phi).
RadialDiagnostics radial_component(const PolyDriftField& field, double r, double phi);

enum class PowerPotential { attractive, repulsive_well };

/// b = -grad V for V = r^alpha (attractive) or V = -r^-alpha (repulsive well).
/// Non-polynomial in general; usable by the classifier but not by the Taylor integrator.
class RadialPowerField {
 public:
  RadialPowerField(std::size_t dim, double alpha, PowerPotential kind);

  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  PowerPotential kind() const { return kind_; }
  std::string name() const;

  /// Throws std::domain_error at the origin unless the drift extends continuously there.
  Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Potential V and its Laplacian, for stationary-density checks.
  double potential(double r) const;
  /// Scalar g with grad V(x) = g(r) x.
  double gradient_factor(double r) const;
  double potential_laplacian(double r) const;

 private:
  std::size_t dim_;
  double alpha_;
  PowerPotential kind_;
};

RadialPowerField make_gradient_power_field(std::size_t dim, double alpha, PowerPotential kind);

// JSON field definition: {"dim": d, "components": [[{"coeff": c, "powers": [...]}, ...], ...], "name": "..."}
PolyDriftField field_from_json(const std::string& text);
std::string field_to_json(const PolyDriftField& field);
PolyDriftField load_field(const std::filesystem::path& path);

/// Built-in fields addressable by name: "z4", "zero", "quartic-well".
PolyDriftField builtin_field(const std::string& name);

}  // namespace ergodiff
