#include "ergodiff/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ergodiff/philox.hpp"

namespace ergodiff {
namespace {

// Domain tags in the top counter word keep the three uses of one master key disjoint.
constexpr std::uint32_t kStepDomain = 0x00000000u;
constexpr std::uint32_t kKeyDomain = 0x4b455953u;
constexpr std::uint32_t kStartDomain = 0x53544152u;

std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

std::array<double, 2> box_muller(std::uint64_t a, std::uint64_t b) {
  const double radius = std::sqrt(-2.0 * std::log(uniform_open_closed(a)));
  const double angle = 2.0 * std::numbers::pi * uniform_open_closed(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

std::uint64_t trajectory_stream_key(std::uint64_t master_seed, std::uint64_t trajectory_index) {
  const auto out = Philox4x32::block({static_cast<std::uint32_t>(trajectory_index),
                                      static_cast<std::uint32_t>(trajectory_index >> 32), 0u, kKeyDomain},
                                     Philox4x32::key_from(master_seed));
  return join(out[0], out[1]);
}

StepNormals step_normals(std::uint64_t stream_key, std::uint64_t step_index) {
  const auto key = Philox4x32::key_from(stream_key);
  const auto lo = static_cast<std::uint32_t>(step_index);
  const auto hi = static_cast<std::uint32_t>(step_index >> 32);
  const auto a = Philox4x32::block({lo, hi, 0u, kStepDomain}, key);
  const auto b = Philox4x32::block({lo, hi, 1u, kStepDomain}, key);
  const auto first = box_muller(join(a[0], a[1]), join(a[2], a[3]));
  const auto second = box_muller(join(b[0], b[1]), join(b[2], b[3]));
  return {first[0], first[1], second[0], second[1]};
}

NoiseIncrement increment_from_normals(const StepNormals& u, double delta) {
  const double sq = std::sqrt(delta);
  const double z_scale = 0.5 * delta * sq;
  const double inv_sqrt3 = 1.0 / std::numbers::sqrt3;
  NoiseIncrement inc;
  inc.dW = Eigen::Vector2d(u[0] * sq, u[2] * sq);
  inc.dZ = Eigen::Vector2d(z_scale * (u[0] + u[1] * inv_sqrt3), z_scale * (u[2] + u[3] * inv_sqrt3));
  return inc;
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index, bool negated)
    : key_(trajectory_stream_key(master_seed, trajectory_index)), negated_(negated) {}

NoiseIncrement NoiseStream::increment(std::uint64_t step_index, double delta) const {
  auto inc = increment_from_normals(step_normals(key_, step_index), delta);
  if (negated_) {
    inc.dW = -inc.dW;
    inc.dZ = -inc.dZ;
  }
  return inc;
}

NoiseIncrement make_noise_stream(std::uint64_t master_seed, std::uint64_t trajectory_index,
                                 std::uint64_t step_index, double delta) {
  return NoiseStream(master_seed, trajectory_index).increment(step_index, delta);
}

std::vector<NoiseIncrement> refine_increments(std::span<const NoiseIncrement> fine, std::size_t m,
                                              double fine_delta) {
  if (m == 0) throw std::invalid_argument("refinement factor must be positive");
  if (fine.size() % m != 0) throw std::invalid_argument("fine increment count is not a multiple of m");
  std::vector<NoiseIncrement> coarse;
  coarse.reserve(fine.size() / m);
  for (std::size_t start = 0; start < fine.size(); start += m) {
    NoiseIncrement acc;
    // partial = W(t_j) - W(t_start) at the left end of fine step j
    Eigen::Vector2d partial = Eigen::Vector2d::Zero();
    for (std::size_t j = start; j < start + m; ++j) {
      acc.dZ += fine[j].dZ + partial * fine_delta;
      partial += fine[j].dW;
    }
    acc.dW = partial;
    coarse.push_back(acc);
  }
  return coarse;
}

std::vector<Eigen::Vector2d> sample_uniform_box(std::uint64_t master_seed, std::size_t count, double lo,
                                                double hi) {
  if (!(hi > lo)) throw std::invalid_argument("start box must have hi > lo");
  const auto key = Philox4x32::key_from(master_seed);
  std::vector<Eigen::Vector2d> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto r = Philox4x32::block(
        {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32), 0u,
         kStartDomain},
        key);
    const double u1 = static_cast<double>(join(r[0], r[1]) >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(join(r[2], r[3]) >> 11) * 0x1.0p-53;
    out.emplace_back(lo + (hi - lo) * u1, lo + (hi - lo) * u2);
  }
  return out;
}

}  // namespace ergodiff
