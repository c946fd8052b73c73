#include "ergodiff/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

#include "ergodiff/parallel.hpp"

namespace ergodiff {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::taylor15_full: return "taylor15_full";
    case Scheme::taylor15_diagonal: return "taylor15_diagonal";
    case Scheme::euler: return "euler";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "taylor15" || name == "taylor15_full") return Scheme::taylor15_full;
  if (name == "taylor15_diagonal") return Scheme::taylor15_diagonal;
  if (name == "euler") return Scheme::euler;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

void SimulationConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  if (!(horizon >= delta) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be >= delta");
  if (checkpoint_stride < 1) throw std::invalid_argument("checkpoint stride must be >= 1");
  if (!start.allFinite()) throw std::invalid_argument("start point must be finite");
  if (!(guard_radius > 0.0)) throw std::invalid_argument("guard radius must be positive");
}

std::size_t SimulationConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(horizon / delta));
}

TaylorDrift::Flat TaylorDrift::flatten(const Polynomial& p) {
  Flat out;
  for (const auto& m : p.terms()) out.push_back({m.coeff, m.powers[0], m.powers[1]});
  return out;
}

TaylorDrift::TaylorDrift(const PolyDriftField& field) {
  if (field.dim() != 2) throw std::invalid_argument("the integrator handles planar fields only");
  const auto jac = jacobian(field);
  for (std::size_t k = 0; k < 2; ++k) {
    Polynomial l0 = laplacian_component(field, k) * 0.5;
    for (std::size_t j = 0; j < 2; ++j) l0 += field.component(j) * jac[k][j];
    l0_.push_back(l0);
    b_[k] = flatten(field.component(k));
    l0b_[k] = flatten(l0);
    for (std::size_t j = 0; j < 2; ++j) jac_[k][j] = flatten(jac[k][j]);
    drift_degree_ = std::max(drift_degree_, field.component(k).degree());
    max_degree_ = std::max({max_degree_, field.component(k).degree(), l0.degree()});
  }
  drift_degree_ = std::max(drift_degree_, 0);
  max_degree_ = std::max(max_degree_, 0);
  if (max_degree_ > kMaxDegree) throw std::invalid_argument("drift degree too high for the Taylor integrator");
}

void TaylorDrift::powers(const Eigen::Vector2d& x, double* pow1, double* pow2, int max_degree) const {
  pow1[0] = 1.0;
  pow2[0] = 1.0;
  for (int p = 1; p <= max_degree; ++p) {
    pow1[p] = pow1[p - 1] * x(0);
    pow2[p] = pow2[p - 1] * x(1);
  }
}

double TaylorDrift::eval(const Flat& p, const double* pow1, const double* pow2) const {
  double sum = 0.0;
  for (const auto& t : p) sum += t.coeff * pow1[t.p1] * pow2[t.p2];
  return sum;
}

Eigen::Vector2d TaylorDrift::drift(const Eigen::Vector2d& x) const {
  std::array<double, kMaxDegree + 1> pow1, pow2;
  powers(x, pow1.data(), pow2.data(), drift_degree_);
  return {eval(b_[0], pow1.data(), pow2.data()), eval(b_[1], pow1.data(), pow2.data())};
}

TaylorDrift::Derivatives TaylorDrift::derivatives(const Eigen::Vector2d& x) const {
  std::array<double, kMaxDegree + 1> pow1, pow2;
  powers(x, pow1.data(), pow2.data(), max_degree_);
  Derivatives d;
  for (int k = 0; k < 2; ++k) {
    d.b(k) = eval(b_[k], pow1.data(), pow2.data());
    d.l0b(k) = eval(l0b_[k], pow1.data(), pow2.data());
    for (int j = 0; j < 2; ++j) d.jac(k, j) = eval(jac_[k][j], pow1.data(), pow2.data());
  }
  return d;
}

Eigen::Vector2d step_taylor15(const TaylorDrift& drift, const Eigen::Vector2d& y, const NoiseIncrement& noise,
                              double delta, TaylorVariant variant) {
  const auto d = drift.derivatives(y);
  Eigen::Vector2d mixed;
  if (variant == TaylorVariant::full) {
    mixed = d.jac * noise.dZ;
  } else {
    mixed = d.jac.diagonal().cwiseProduct(noise.dZ);
  }
  return y + d.b * delta + noise.dW + 0.5 * d.l0b * (delta * delta) + mixed;
}

Eigen::Vector2d step_euler(const TaylorDrift& drift, const Eigen::Vector2d& y, const NoiseIncrement& noise,
                           double delta) {
  return y + drift.drift(y) * delta + noise.dW;
}

Eigen::Vector2d step(Scheme scheme, const TaylorDrift& drift, const Eigen::Vector2d& y,
                     const NoiseIncrement& noise, double delta) {
  switch (scheme) {
    case Scheme::taylor15_full: return step_taylor15(drift, y, noise, delta, TaylorVariant::full);
    case Scheme::taylor15_diagonal: return step_taylor15(drift, y, noise, delta, TaylorVariant::diagonal);
    case Scheme::euler: return step_euler(drift, y, noise, delta);
  }
  throw std::logic_error("unhandled scheme");
}

Trajectory simulate(const PolyDriftField& field, const SimulationConfig& config) {
  config.validate();
  const TaylorDrift drift(field);
  const NoiseStream stream(config.master_seed, config.trajectory_index, config.negate_noise);
  const std::size_t n = config.step_count();
  const std::size_t stride = config.checkpoint_stride;

  Trajectory traj;
  traj.config = config;
  traj.stream_key = stream.key();
  traj.times.reserve(n / stride + 2);
  traj.states.reserve(n / stride + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(config.start);

  Eigen::Vector2d y = config.start;
  for (std::size_t s = 0; s < n; ++s) {
    const NoiseIncrement noise = config.zero_noise ? NoiseIncrement{} : stream.increment(s, config.delta);
    y = step(config.scheme, drift, y, noise, config.delta);
    if (!(y.norm() <= config.guard_radius)) {
      traj.exploded = true;
      traj.explosion_time = static_cast<double>(s + 1) * config.delta;
      break;
    }
    if ((s + 1) % stride == 0 || s + 1 == n) {
      traj.times.push_back(static_cast<double>(s + 1) * config.delta);
      traj.states.push_back(y);
    }
  }
  return traj;
}

Trajectory simulate(const SimulationConfig& config) { return simulate(builtin_field(config.field_name), config); }

std::pair<double, double> loglog_fit(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size() || deltas.size() < 2)
    throw std::invalid_argument("log-log fit needs at least two matching points");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(deltas.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(deltas.size()));
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = std::log(deltas[i]);
    design(row, 1) = 1.0;
    rhs(row) = std::log(errors[i]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1)};
}

namespace {

Eigen::Vector2d integrate_with(Scheme scheme, const TaylorDrift& drift, Eigen::Vector2d y,
                               const std::vector<NoiseIncrement>& increments, double delta) {
  for (const auto& inc : increments) y = step(scheme, drift, y, inc, delta);
  return y;
}

}  // namespace

StrongOrderResult strong_order_estimate(const PolyDriftField& field, Scheme scheme, const StrongOrderSetup& setup) {
  if (!(setup.reference_delta > 0.0)) throw std::invalid_argument("reference delta must be positive");
  if (setup.deltas.empty()) throw std::invalid_argument("need at least one coarse delta");
  if (setup.n_paths == 0) throw std::invalid_argument("need at least one path");
  const double ref_steps_real = setup.horizon / setup.reference_delta;
  const auto ref_steps = static_cast<std::size_t>(std::llround(ref_steps_real));
  if (ref_steps == 0 || std::abs(ref_steps_real - static_cast<double>(ref_steps)) > 1e-9 * ref_steps_real)
    throw std::invalid_argument("horizon is not a multiple of the reference delta");

  std::vector<std::size_t> factors;
  for (double d : setup.deltas) {
    const double ratio = d / setup.reference_delta;
    const auto m = static_cast<std::size_t>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio || ref_steps % m != 0)
      throw std::invalid_argument("coarse delta is not commensurate with the reference delta");
    factors.push_back(m);
  }

  const TaylorDrift drift(field);
  // errors_by_path[p][i] for coarse grid i
  std::vector<std::vector<double>> errors_by_path(setup.n_paths, std::vector<double>(factors.size()));
  parallel_for(setup.n_paths, setup.workers, [&](std::size_t p) {
    const NoiseStream stream(setup.master_seed, p);
    std::vector<NoiseIncrement> fine(ref_steps);
    for (std::size_t s = 0; s < ref_steps; ++s) fine[s] = stream.increment(s, setup.reference_delta);
    const Eigen::Vector2d reference = integrate_with(scheme, drift, setup.start, fine, setup.reference_delta);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto coarse = factors[i] == 1 ? fine : refine_increments(fine, factors[i], setup.reference_delta);
      const Eigen::Vector2d y = integrate_with(scheme, drift, setup.start, coarse, setup.deltas[i]);
      errors_by_path[p][i] = (y - reference).norm();
    }
  });

  StrongOrderResult result;
  result.scheme = scheme;
  result.reference_delta = setup.reference_delta;
  result.deltas = setup.deltas;
  result.errors.assign(factors.size(), 0.0);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    double sum = 0.0;
    for (std::size_t p = 0; p < setup.n_paths; ++p) sum += errors_by_path[p][i];
    result.errors[i] = sum / static_cast<double>(setup.n_paths);
    if (!std::isfinite(result.errors[i])) throw std::runtime_error("strong error is not finite");
  }
  const bool all_positive =
      std::all_of(result.errors.begin(), result.errors.end(), [](double e) { return e > 0.0; });
  if (result.errors.size() >= 2 && all_positive) {
    std::tie(result.slope, result.intercept) = loglog_fit(result.deltas, result.errors);
  }
  return result;
}

}  // namespace ergodiff
