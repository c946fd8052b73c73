#include "ergodiff/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "ergodiff/noise.hpp"
#include "ergodiff/parallel.hpp"

namespace ergodiff {
namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Mean of f over each checkpoint interval, recovered from the running averages.
std::vector<double> interval_means(const ErgodicSeries& s) {
  std::vector<double> out(s.times.size());
  double prev_t = 0.0, prev_int = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double integral = s.times[i] * s.averages[i];
    out[i] = (integral - prev_int) / (s.times[i] - prev_t);
    prev_t = s.times[i];
    prev_int = integral;
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe batch_means(std::span<const double> values, std::size_t batches) {
  MeanSe out;
  if (values.empty()) return out;
  double total = 0.0;
  for (double v : values) total += v;
  out.mean = total / static_cast<double>(values.size());
  batches = std::min(batches, values.size());
  if (batches < 2) return out;
  const std::size_t per = values.size() / batches;
  const std::size_t offset = values.size() - per * batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < per; ++i) means[b] += values[offset + b * per + i];
    means[b] /= static_cast<double>(per);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(batches);
  double ss = 0.0;
  for (double x : means) ss += (x - m) * (x - m);
  out.se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return out;
}

}  // namespace

ErgodicSeries time_average(const Trajectory& trajectory, const IndicatorBall& f) {
  if (trajectory.states.empty()) throw std::invalid_argument("empty trajectory");
  // A truncated path contributes its last recorded state up to the explosion time.
  const bool tail = trajectory.explosion_time && *trajectory.explosion_time > trajectory.times.back();
  if (trajectory.states.size() < 2 && !tail) throw std::invalid_argument("trajectory has no recorded step");
  ErgodicSeries s;
  s.seed = trajectory.stream_key;
  s.start = trajectory.states.front();
  s.f = f;
  s.exploded = trajectory.exploded;
  s.times.reserve(trajectory.times.size() - 1);
  s.averages.reserve(trajectory.times.size() - 1);
  CompensatedSum integral;
  for (std::size_t j = 0; j + 1 < trajectory.states.size(); ++j) {
    integral.add(f(trajectory.states[j]) * (trajectory.times[j + 1] - trajectory.times[j]));
    s.times.push_back(trajectory.times[j + 1]);
    s.averages.push_back(integral.value() / trajectory.times[j + 1]);
  }
  if (tail) {
    const double end = *trajectory.explosion_time;
    integral.add(f(trajectory.states.back()) * (end - trajectory.times.back()));
    s.times.push_back(end);
    s.averages.push_back(integral.value() / end);
  }
  return s;
}

double batch_standard_error(const ErgodicSeries& series, std::size_t batches) {
  const auto v = interval_means(series);
  return batch_means(v, batches).se;
}

ConvergenceDiagnostic convergence_diagnostic(const ErgodicSeries& series, double window_fraction,
                                             std::size_t batches_per_window) {
  if (!(window_fraction > 0.0 && window_fraction < 0.5)) throw std::invalid_argument("window fraction must be in (0, 1/2)");
  const auto v = interval_means(series);
  const auto window = static_cast<std::size_t>(std::floor(window_fraction * static_cast<double>(v.size())));
  if (window < 1 || 2 * window > v.size()) throw std::invalid_argument("series shorter than two windows");
  const std::span<const double> all(v);
  const auto last = batch_means(all.subspan(v.size() - window, window), batches_per_window);
  const auto before = batch_means(all.subspan(v.size() - 2 * window, window), batches_per_window);
  ConvergenceDiagnostic d;
  d.drift_of_mean = last.mean - before.mean;
  d.pooled_standard_error = std::hypot(last.se, before.se);
  d.stabilized = std::abs(d.drift_of_mean) <= 3.0 * d.pooled_standard_error;
  return d;
}

std::vector<Eigen::Vector2d> ensemble_starts(const EnsembleConfig& config) {
  if (config.starts) {
    if (config.starts->size() != config.n_traj) throw std::invalid_argument("explicit starts must match n_traj");
    return *config.starts;
  }
  return sample_uniform_box(config.master_seed, config.n_traj, config.box_lo, config.box_hi);
}

std::vector<EnsembleSummary> run_ensemble(const PolyDriftField& field, const std::vector<IndicatorBall>& balls,
                                          const EnsembleConfig& config) {
  if (config.n_traj < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
  const auto starts = ensemble_starts(config);

  // series[i][b]: trajectory i, ball b
  std::vector<std::vector<ErgodicSeries>> series(config.n_traj);
  parallel_for(config.n_traj, config.workers, [&](std::size_t i) {
    SimulationConfig sim;
    sim.field_name = field.name();
    sim.delta = config.delta;
    sim.horizon = config.horizon;
    sim.start = starts[i];
    sim.scheme = config.scheme;
    sim.master_seed = config.master_seed;
    sim.checkpoint_stride = config.checkpoint_stride;
    sim.trajectory_index = i;
    sim.negate_noise = config.negate_noise;
    const Trajectory traj = simulate(field, sim);
    for (const auto& ball : balls) series[i].push_back(time_average(traj, ball));
  });

  std::vector<EnsembleSummary> out;
  for (std::size_t b = 0; b < balls.size(); ++b) {
    EnsembleSummary s;
    s.f = balls[b];
    s.starts = starts;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < config.n_traj; ++i) {
      s.series.push_back(std::move(series[i][b]));
      const auto& ser = s.series.back();
      s.terminals.push_back(ser.terminal());
      s.standard_errors.push_back(batch_standard_error(ser));
      if (ser.exploded) ++s.exploded;
      if (ser.times.size() > longest) {
        longest = ser.times.size();
        s.checkpoint_times = ser.times;
      }
    }
    s.checkpoint_mean.assign(longest, 0.0);
    s.checkpoint_sd.assign(longest, 0.0);
    for (std::size_t c = 0; c < longest; ++c) {
      double sum = 0.0, sq = 0.0;
      std::size_t n = 0;
      for (const auto& ser : s.series) {
        if (c >= ser.averages.size()) continue;
        sum += ser.averages[c];
        ++n;
      }
      const double mean = sum / static_cast<double>(n);
      for (const auto& ser : s.series) {
        if (c < ser.averages.size()) sq += (ser.averages[c] - mean) * (ser.averages[c] - mean);
      }
      s.checkpoint_mean[c] = mean;
      s.checkpoint_sd[c] = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : 0.0;
    }
    double sum = 0.0;
    for (double t : s.terminals) sum += t;
    s.mean_terminal = sum / static_cast<double>(s.terminals.size());
    double sq = 0.0;
    for (double t : s.terminals) sq += (t - s.mean_terminal) * (t - s.mean_terminal);
    s.sd_terminal = s.terminals.size() > 1 ? std::sqrt(sq / static_cast<double>(s.terminals.size() - 1)) : 0.0;
    s.sem_terminal = s.sd_terminal / std::sqrt(static_cast<double>(s.terminals.size()));
    out.push_back(std::move(s));
  }
  return out;
}

EnsembleSummary run_ensemble(const PolyDriftField& field, const IndicatorBall& f, const EnsembleConfig& config) {
  return std::move(run_ensemble(field, std::vector<IndicatorBall>{f}, config).front());
}

std::vector<OccupationRow> occupation_comparison(const PolyDriftField& field,
                                                 const std::vector<Eigen::Vector2d>& centers, double radius,
                                                 const EnsembleConfig& config) {
  std::vector<IndicatorBall> balls;
  for (const auto& c : centers) balls.push_back({c, radius});
  const auto summaries = run_ensemble(field, balls, config);
  std::vector<OccupationRow> rows;
  for (const auto& s : summaries) rows.push_back({s.f.center, s.mean_terminal, s.sem_terminal, s.terminals});
  return rows;
}

std::vector<Eigen::Vector2d> reference_centers() {
  const double diag = 1.0 / std::numbers::sqrt2;
  return {{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {3.0, 0.0}, {0.0, 3.0}, {2.0 * diag, 2.0 * diag}, {3.0 * diag, 3.0 * diag}};
}

}  // namespace ergodiff
