#include "ergodiff/drift_fields.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ergodiff {

PolyDriftField::PolyDriftField(std::vector<Polynomial> components, std::string name)
    : components_(std::move(components)), name_(std::move(name)) {
  if (components_.empty()) throw std::invalid_argument("drift field needs at least one component");
  for (const auto& c : components_) {
    if (c.dim() != components_.size())
      throw std::invalid_argument("drift component dimension does not match number of components");
  }
}

PolyDriftField PolyDriftField::zero(std::size_t dim, std::string name) {
  return PolyDriftField(std::vector<Polynomial>(dim, Polynomial(dim)), std::move(name));
}

PolyDriftField make_holomorphic_power_field(int n) {
  if (n < 1) throw std::invalid_argument("holomorphic power must be >= 1");
  // d/dz z^n = n z^(n-1); expand (x1 + i x2)^(n-1) binomially and split by i^k.
  const int m = n - 1;
  std::vector<Monomial> re, im;
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) binom = binom * (m - k + 1) / k;
    const double coeff = -n * binom * ((k / 2) % 2 == 0 ? 1.0 : -1.0);
    Monomial term{coeff, {m - k, k}};
    (k % 2 == 0 ? re : im).push_back(std::move(term));
  }
  return PolyDriftField({Polynomial(2, std::move(re)), Polynomial(2, std::move(im))},
                        "z" + std::to_string(n));
}

PolyDriftField make_z4_field() { return make_holomorphic_power_field(4); }

PolyDriftField make_gradient_field(const Polynomial& potential, std::string name) {
  std::vector<Polynomial> comps;
  for (std::size_t j = 0; j < potential.dim(); ++j) comps.push_back(potential.derivative(j) * -1.0);
  return PolyDriftField(std::move(comps), std::move(name));
}

PolyMatrix jacobian(const PolyDriftField& field) {
  PolyMatrix jac(field.dim());
  for (std::size_t k = 0; k < field.dim(); ++k) {
    for (std::size_t j = 0; j < field.dim(); ++j) jac[k].push_back(field.component(k).derivative(j));
  }
  return jac;
}

Polynomial laplacian_component(const PolyDriftField& field, std::size_t k) {
  if (k >= field.dim()) throw std::out_of_range("component index out of range");
  return field.component(k).laplacian();
}

Polynomial curl2d(const PolyDriftField& field) {
  if (field.dim() != 2) throw std::invalid_argument("curl2d requires a planar field");
  return field.component(1).derivative(0) - field.component(0).derivative(1);
}

RadialDiagnostics radial_component(const PolyDriftField& field, double r, double phi) {
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  if (field.dim() != 2) throw std::invalid_argument("radial_component requires a planar field");
  const Eigen::Vector2d x(r * std::cos(phi), r * std::sin(phi));
  return {r, phi, x.dot(field.eval(x)) / r};
}

RadialPowerField::RadialPowerField(std::size_t dim, double alpha, PowerPotential kind)
    : dim_(dim), alpha_(alpha), kind_(kind) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

std::string RadialPowerField::name() const {
  std::ostringstream os;
  os << (kind_ == PowerPotential::attractive ? "power-attractive" : "power-well") << "(d=" << dim_
     << ",alpha=" << alpha_ << ")";
  return os.str();
}

double RadialPowerField::potential(double r) const {
  return kind_ == PowerPotential::attractive ? std::pow(r, alpha_) : -std::pow(r, -alpha_);
}

double RadialPowerField::gradient_factor(double r) const {
  return kind_ == PowerPotential::attractive ? alpha_ * std::pow(r, alpha_ - 2.0)
                                             : alpha_ * std::pow(r, -alpha_ - 2.0);
}

double RadialPowerField::potential_laplacian(double r) const {
  const double d = static_cast<double>(dim_);
  return kind_ == PowerPotential::attractive ? alpha_ * (d + alpha_ - 2.0) * std::pow(r, alpha_ - 2.0)
                                             : alpha_ * (d - alpha_ - 2.0) * std::pow(r, -alpha_ - 2.0);
}

Eigen::VectorXd RadialPowerField::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw std::invalid_argument("point has wrong dimension");
  const double r = x.norm();
  if (r == 0.0) {
    if (kind_ == PowerPotential::attractive && alpha_ > 1.0) return Eigen::VectorXd::Zero(x.size());
    throw std::domain_error("drift is singular at r = 0");
  }
  return -gradient_factor(r) * x;
}

RadialPowerField make_gradient_power_field(std::size_t dim, double alpha, PowerPotential kind) {
  return RadialPowerField(dim, alpha, kind);
}

PolyDriftField field_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto dim = j.at("dim").get<std::size_t>();
  const auto& comps = j.at("components");
  if (comps.size() != dim) throw std::invalid_argument("field file: components must have dim entries");
  std::vector<Polynomial> out;
  for (const auto& comp : comps) {
    std::vector<Monomial> terms;
    for (const auto& t : comp) terms.push_back({t.at("coeff").get<double>(), t.at("powers").get<std::vector<int>>()});
    out.emplace_back(dim, std::move(terms));
  }
  return PolyDriftField(std::move(out), j.value("name", std::string("unnamed")));
}

std::string field_to_json(const PolyDriftField& field) {
  nlohmann::ordered_json j;
  j["dim"] = field.dim();
  j["components"] = nlohmann::ordered_json::array();
  for (const auto& comp : field.components()) {
    auto terms = nlohmann::ordered_json::array();
    for (const auto& m : comp.terms()) {
      nlohmann::ordered_json t;
      t["coeff"] = m.coeff;
      t["powers"] = m.powers;
      terms.push_back(t);
    }
    j["components"].push_back(terms);
  }
  j["name"] = field.name();
  return j.dump(2) + "\n";
}

PolyDriftField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return field_from_json(ss.str());
}

PolyDriftField builtin_field(const std::string& name) {
  if (name == "z4") return make_z4_field();
  if (name == "zero") return PolyDriftField::zero(2);
  if (name == "quartic-well") {
    const auto r2 = Polynomial::coordinate(2, 0) * Polynomial::coordinate(2, 0) +
                    Polynomial::coordinate(2, 1) * Polynomial::coordinate(2, 1);
    return make_gradient_field(r2 * r2, "quartic-well");
  }
  throw std::invalid_argument("unknown built-in field '" + name + "'");
}

}  // namespace ergodiff
