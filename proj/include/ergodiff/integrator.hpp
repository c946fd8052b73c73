#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ergodiff/drift_fields.hpp"
#include "ergodiff/noise.hpp"

namespace ergodiff {

enum class Scheme { taylor15_full, taylor15_diagonal, euler };

std::string to_string(Scheme scheme);
/// Accepts "taylor15" as an alias of "taylor15_full".
Scheme parse_scheme(const std::string& name);

struct SimulationConfig {
  std::string field_name = "z4";
  double delta = 1e-4;
  double horizon = 1.0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Scheme scheme = Scheme::taylor15_full;
  std::uint64_t master_seed = 0;
  std::size_t checkpoint_stride = 100;
  std::uint64_t trajectory_index = 0;
  bool negate_noise = false;
  /// Test hook: drive the scheme with dW = dZ = 0.
  bool zero_noise = false;
  double guard_radius = 1e6;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  std::size_t step_count() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::Vector2d> states;
  SimulationConfig config;
  std::uint64_t stream_key = 0;
  bool exploded = false;
  std::optional<double> explosion_time;
};

/// Planar polynomial drift with its Jacobian and L0 b_k = b . grad b_k + (1/2) lap b_k
/// precomputed as exact polynomials, flattened for fast evaluation.
class TaylorDrift {
 public:
  explicit TaylorDrift(const PolyDriftField& field);

  struct Derivatives {
    Eigen::Vector2d b;
    Eigen::Matrix2d jac;  // jac(k, j) = d b_k / d x_j
    Eigen::Vector2d l0b;
  };

  Eigen::Vector2d drift(const Eigen::Vector2d& x) const;
  Derivatives derivatives(const Eigen::Vector2d& x) const;

  const Polynomial& l0_polynomial(std::size_t k) const { return l0_.at(k); }

 private:
  static constexpr int kMaxDegree = 15;

  struct Term {
    double coeff;
    int p1;
    int p2;
  };
  using Flat = std::vector<Term>;

  static Flat flatten(const Polynomial& p);
  double eval(const Flat& p, const double* pow1, const double* pow2) const;
  void powers(const Eigen::Vector2d& x, double* pow1, double* pow2, int max_degree) const;

  std::vector<Polynomial> l0_;
  Flat b_[2];
  Flat jac_[2][2];
  Flat l0b_[2];
  int drift_degree_ = 0;
  int max_degree_ = 0;
};

enum class TaylorVariant { full, diagonal };

/// One strong order-1.5 step for dX = b dt + dW:
/// y + b dt + dW + (1/2) L0 b dt^2 + mixed, mixed_k = sum_j d_j b_k dZ^j (full)
/// or d_k b_k dZ^k (diagonal).
Eigen::Vector2d step_taylor15(const TaylorDrift& drift, const Eigen::Vector2d& y, const NoiseIncrement& noise,
                              double delta, TaylorVariant variant = TaylorVariant::full);

Eigen::Vector2d step_euler(const TaylorDrift& drift, const Eigen::Vector2d& y, const NoiseIncrement& noise,
                           double delta);

Eigen::Vector2d step(Scheme scheme, const TaylorDrift& drift, const Eigen::Vector2d& y,
                     const NoiseIncrement& noise, double delta);

Trajectory simulate(const PolyDriftField& field, const SimulationConfig& config);
/// Resolves config.field_name among the built-in fields.
Trajectory simulate(const SimulationConfig& config);

struct StrongOrderResult {
  Scheme scheme = Scheme::taylor15_full;
  double reference_delta = 0.0;
  std::vector<double> deltas;
  std::vector<double> errors;  // E |Y_T^delta - Y_T^ref|
  double slope = 0.0;
  double intercept = 0.0;
};

struct StrongOrderSetup {
  Eigen::Vector2d start = Eigen::Vector2d(0.5, 0.0);
  double horizon = 0.5;
  // Coarse steps 2^-6 T .. 2^-10 T; each an integer multiple of reference_delta = 2^-14 T.
  std::vector<double> deltas = {0.5 / 64, 0.5 / 128, 0.5 / 256, 0.5 / 512, 0.5 / 1024};
  double reference_delta = 0.5 / 16384;
  std::size_t n_paths = 200;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

/// Monte Carlo strong error on coupled grids and its least-squares log-log slope.
StrongOrderResult strong_order_estimate(const PolyDriftField& field, Scheme scheme, const StrongOrderSetup& setup);

/// Least-squares slope and intercept of log(errors) against log(deltas).
std::pair<double, double> loglog_fit(const std::vector<double>& deltas, const std::vector<double>& errors);

}  // namespace ergodiff
