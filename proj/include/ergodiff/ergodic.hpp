#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ergodiff/drift_fields.hpp"
#include "ergodiff/integrator.hpp"

namespace ergodiff {

/// Indicator of the open ball |x - center| < radius.
struct IndicatorBall {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;

  double operator()(const Eigen::Vector2d& x) const { return (x - center).squaredNorm() < radius * radius ? 1.0 : 0.0; }
};

/// Running time average f_T = (1/T) int_0^T f(X_t) dt on the checkpoint grid,
/// left-endpoint rule.
struct ErgodicSeries {
  std::vector<double> times;     // T_1, ..., T_n (T_0 = 0 has no average)
  std::vector<double> averages;  // f_{T_i}
  std::uint64_t seed = 0;        // noise stream key of the trajectory
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  IndicatorBall f;
  bool exploded = false;

  double terminal() const { return averages.back(); }
};

/// For an exploded trajectory the series ends at the explosion time. Throws
/// std::invalid_argument when no time elapses.
ErgodicSeries time_average(const Trajectory& trajectory, const IndicatorBall& f);

/// Standard error of f_T at the final checkpoint from non-overlapping batch means of the
/// per-interval occupation.
double batch_standard_error(const ErgodicSeries& series, std::size_t batches = 20);

struct ConvergenceDiagnostic {
  bool stabilized = false;
  double drift_of_mean = 0.0;
  double pooled_standard_error = 0.0;
};

/// Mean occupation over the last window versus the window before it; stabilized iff the
/// difference is within 3 pooled batch-means standard errors.
ConvergenceDiagnostic convergence_diagnostic(const ErgodicSeries& series, double window_fraction,
                                             std::size_t batches_per_window = 10);

struct EnsembleConfig {
  std::size_t n_traj = 8;
  double horizon = 100.0;
  double delta = 1e-4;
  std::size_t checkpoint_stride = 100;
  Scheme scheme = Scheme::taylor15_full;
  std::uint64_t master_seed = 0;
  double box_lo = -10.0;
  double box_hi = 10.0;
  /// Explicit starting points override sampling from the box.
  std::optional<std::vector<Eigen::Vector2d>> starts;
  bool negate_noise = false;
  std::size_t workers = 1;
};

struct EnsembleSummary {
  IndicatorBall f;
  std::vector<Eigen::Vector2d> starts;
  std::vector<ErgodicSeries> series;
  std::vector<double> terminals;
  std::vector<double> standard_errors;  // per trajectory, batch means
  /// Cross-trajectory mean and sample standard deviation at each checkpoint, over the
  /// trajectories that reach it.
  std::vector<double> checkpoint_times;
  std::vector<double> checkpoint_mean;
  std::vector<double> checkpoint_sd;
  double mean_terminal = 0.0;
  double sd_terminal = 0.0;
  double sem_terminal = 0.0;
  std::size_t exploded = 0;
};

std::vector<Eigen::Vector2d> ensemble_starts(const EnsembleConfig& config);

EnsembleSummary run_ensemble(const PolyDriftField& field, const IndicatorBall& f, const EnsembleConfig& config);

/// One simulation per trajectory, evaluated against every ball.
std::vector<EnsembleSummary> run_ensemble(const PolyDriftField& field, const std::vector<IndicatorBall>& balls,
                                          const EnsembleConfig& config);

struct OccupationRow {
  Eigen::Vector2d center;
  double mean_terminal = 0.0;
  double sem_terminal = 0.0;
  std::vector<double> terminals;
};

std::vector<OccupationRow> occupation_comparison(const PolyDriftField& field,
                                                 const std::vector<Eigen::Vector2d>& centers, double radius,
                                                 const EnsembleConfig& config);

/// Ball centers of the reference experiment: (0,0), (2,0), (0,2), (3,0), (0,3),
/// 2 (1,1)/sqrt 2, 3 (1,1)/sqrt 2.
std::vector<Eigen::Vector2d> reference_centers();

}  // namespace ergodiff
