#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ergodiff {

/// Brownian increment dW and its time integral dZ = int (W_s - W_start) ds over one step.
struct NoiseIncrement {
  Eigen::Vector2d dW = Eigen::Vector2d::Zero();
  Eigen::Vector2d dZ = Eigen::Vector2d::Zero();
};

/// Four independent standard normals (U1^1, U2^1, U1^2, U2^2) for one step.
using StepNormals = std::array<double, 4>;

/// 64-bit stream key for trajectory `trajectory_index` under `master_seed`, derived by a
/// Philox block so that distinct (seed, index) pairs give unrelated keys.
std::uint64_t trajectory_stream_key(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Counter-based normals: a pure function of (stream_key, step_index).
StepNormals step_normals(std::uint64_t stream_key, std::uint64_t step_index);

/// dW^k = U1^k sqrt(delta), dZ^k = delta^{3/2} (U1^k + U2^k / sqrt 3) / 2.
NoiseIncrement increment_from_normals(const StepNormals& u, double delta);

/// Per-trajectory noise source. Identical inputs give identical increments in any call order.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index, bool negated = false);

  std::uint64_t key() const { return key_; }
  bool negated() const { return negated_; }
  NoiseIncrement increment(std::uint64_t step_index, double delta) const;

 private:
  std::uint64_t key_;
  bool negated_;
};

NoiseIncrement make_noise_stream(std::uint64_t master_seed, std::uint64_t trajectory_index,
                                 std::uint64_t step_index, double delta);

/// Aggregate groups of m consecutive fine increments (step fine_delta) into coarse increments
/// driven by the same Brownian path. Throws if the length is not a multiple of m.
std::vector<NoiseIncrement> refine_increments(std::span<const NoiseIncrement> fine, std::size_t m,
                                              double fine_delta);

/// Uniform points in the box [lo, hi]^2, drawn from a stream reserved for start sampling.
std::vector<Eigen::Vector2d> sample_uniform_box(std::uint64_t master_seed, std::size_t count, double lo,
                                                double hi);

}  // namespace ergodiff
