#include <doctest.h>

#include <cmath>

#include "ergodiff/integrator.hpp"

using namespace ergodiff;

namespace {

NoiseIncrement quiet() { return {}; }

// Classical RK4 for x' = b(x).
Eigen::Vector2d rk4(const TaylorDrift& f, Eigen::Vector2d x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector2d k1 = f.drift(x);
    const Eigen::Vector2d k2 = f.drift(x + 0.5 * h * k1);
    const Eigen::Vector2d k3 = f.drift(x + 0.5 * h * k2);
    const Eigen::Vector2d k4 = f.drift(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("L0 b of the z4 field") {
    const TaylorDrift d(make_z4_field());
    const auto der = d.derivatives({1, 1});
    CHECK(der.b.isApprox(Eigen::Vector2d(8, -8)));
    CHECK(der.l0b.isApprox(Eigen::Vector2d(-192, -192)));
    CHECK(der.jac(0, 1) == doctest::Approx(24));
    CHECK(der.jac(1, 0) == doctest::Approx(-24));
  }

  TEST_CASE("noise-free Taylor step") {
    const TaylorDrift d(make_z4_field());
    for (auto v : {TaylorVariant::full, TaylorVariant::diagonal}) {
      const auto y = step_taylor15(d, {1, 1}, quiet(), 0.01, v);
      CHECK(y(0) == doctest::Approx(1.0704).epsilon(1e-12));
      CHECK(y(1) == doctest::Approx(0.9104).epsilon(1e-12));
    }
  }

  TEST_CASE("full and diagonal variants differ by the off-diagonal mixed term") {
    const TaylorDrift d(make_z4_field());
    NoiseIncrement n;
    n.dZ = {1e-3, 0};
    const auto full = step_taylor15(d, {1, 1}, n, 0.01, TaylorVariant::full);
    const auto diag = step_taylor15(d, {1, 1}, n, 0.01, TaylorVariant::diagonal);
    CHECK(full(0) - diag(0) == doctest::Approx(0.0));
    CHECK(full(1) - diag(1) == doctest::Approx(-0.024).epsilon(1e-9));
  }

  TEST_CASE("zero drift steps add the Brownian increment") {
    const TaylorDrift d(PolyDriftField::zero(2));
    NoiseIncrement n;
    n.dW = {0.3, -0.1};
    n.dZ = {0.05, 0.07};
    const Eigen::Vector2d y(2, 5);
    CHECK(step_taylor15(d, y, n, 0.1) == y + n.dW);
    CHECK(step_euler(d, y, n, 0.1) == y + n.dW);
  }

  TEST_CASE("Euler steps") {
    const TaylorDrift d(make_z4_field());
    const auto y = step_euler(d, {1, 0}, quiet(), 0.1);
    CHECK(y(0) == doctest::Approx(0.6));
    CHECK(y(1) == 0.0);
    CHECK(step_euler(d, {0.3, 0.4}, quiet(), 0.0) == Eigen::Vector2d(0.3, 0.4));
  }

  TEST_CASE("noise-free Taylor step matches the ODE flow to third order") {
    const TaylorDrift d(make_z4_field());
    const Eigen::Vector2d x0(1, 1);
    // x''' = grad(L0 b) . b; L0 b equals J b here because both components are harmonic.
    const Eigen::Vector2d b = d.drift(x0);
    Eigen::Vector2d third;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& l0 = d.l0_polynomial(k);
      third(static_cast<Eigen::Index>(k)) = l0.derivative(0)(x0) * b(0) + l0.derivative(1)(x0) * b(1);
    }
    for (double delta : {1e-3, 5e-4, 2.5e-4}) {
      const Eigen::Vector2d exact = rk4(d, x0, delta, 1000);
      const Eigen::Vector2d err = exact - step_taylor15(d, x0, quiet(), delta);
      const Eigen::Vector2d lead = third * delta * delta * delta / 6.0;
      CHECK((err - lead).norm() < 0.05 * lead.norm());
    }
  }

  TEST_CASE("scheme names") {
    CHECK(parse_scheme("taylor15") == Scheme::taylor15_full);
    CHECK(parse_scheme("taylor15_full") == Scheme::taylor15_full);
    CHECK(parse_scheme("taylor15_diagonal") == Scheme::taylor15_diagonal);
    CHECK(parse_scheme("euler") == Scheme::euler);
    CHECK_THROWS(parse_scheme("rk4"));
    CHECK(to_string(Scheme::euler) == "euler");
  }

  TEST_CASE("config validation") {
    SimulationConfig c;
    c.delta = 0.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.horizon = c.delta / 2;
    CHECK_THROWS(c.validate());
    c = {};
    c.checkpoint_stride = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.horizon = 1.0;
    c.delta = 1e-4;
    CHECK(c.step_count() == 10000);
  }

  TEST_CASE("checkpoint grid") {
    SimulationConfig c;
    c.start = {1, 1};
    c.delta = 1e-4;
    c.horizon = 1.0;
    c.master_seed = 7;
    const auto t = simulate(make_z4_field(), c);
    CHECK(t.states.size() == 10000 / 100 + 1);
    CHECK(t.times.front() == 0.0);
    CHECK(t.states.front() == c.start);
    CHECK(t.times.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < t.times.size(); ++i)
      CHECK(t.times[i] - t.times[i - 1] == doctest::Approx(100 * 1e-4));
    CHECK_FALSE(t.exploded);
  }

  TEST_CASE("simulation is deterministic") {
    SimulationConfig c;
    c.start = {2, -1};
    c.horizon = 0.5;
    c.master_seed = 99;
    const auto a = simulate(c);
    const auto b = simulate(c);
    CHECK(a.states == b.states);
    c.scheme = Scheme::euler;
    const auto e = simulate(c);
    CHECK(e.states.front() == a.states.front());
    CHECK(e.states.back() != a.states.back());
  }

  TEST_CASE("single zero-drift step reproduces the raw increment") {
    SimulationConfig c;
    c.field_name = "zero";
    c.delta = 1.0;
    c.horizon = 1.0;
    c.checkpoint_stride = 1;
    c.master_seed = 4;
    c.start = {0.5, 0.25};
    const auto t = simulate(c);
    REQUIRE(t.states.size() == 2);
    CHECK(t.states[1] - t.states[0] == make_noise_stream(4, 0, 0, 1.0).dW);
  }

  TEST_CASE("origin is an equilibrium without noise") {
    SimulationConfig c;
    c.zero_noise = true;
    c.horizon = 1.0;
    const auto t = simulate(c);
    for (const auto& s : t.states) CHECK(s == Eigen::Vector2d::Zero());
  }

  TEST_CASE("explosion guard truncates and flags") {
    SimulationConfig c;
    c.zero_noise = true;
    c.start = {0, 10};  // unstable direction of the deterministic flow
    c.delta = 1e-2;
    c.horizon = 10.0;
    const auto t = simulate(c);
    CHECK(t.exploded);
    REQUIRE(t.explosion_time.has_value());
    CHECK(*t.explosion_time < c.horizon);
    CHECK(t.times.back() <= *t.explosion_time);
  }

  TEST_CASE("no explosion from (10, 10) over 100 seeds") {
    SimulationConfig c;
    c.start = {10, 10};
    c.delta = 1e-4;
    c.horizon = 1.0;
    int exploded = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      c.master_seed = seed;
      exploded += simulate(c).exploded ? 1 : 0;
    }
    CHECK(exploded == 0);
  }

  TEST_CASE("zero drift is exact on coupled grids") {
    StrongOrderSetup s;
    s.n_paths = 20;
    s.deltas = {0.5 / 16, 0.5 / 64};
    s.reference_delta = 0.5 / 256;
    for (auto scheme : {Scheme::taylor15_full, Scheme::euler}) {
      const auto r = strong_order_estimate(PolyDriftField::zero(2), scheme, s);
      for (double e : r.errors) CHECK(e < 1e-12);
    }
  }

  TEST_CASE("strong order setup is checked") {
    StrongOrderSetup s;
    s.deltas = {0.5 / 3};
    s.reference_delta = 0.5 / 16;
    CHECK_THROWS(strong_order_estimate(make_z4_field(), Scheme::euler, s));
  }

  TEST_CASE("log-log fit") {
    const auto [slope, intercept] = loglog_fit({1e-1, 1e-2, 1e-3}, {2e-3, 2e-6, 2e-9});
    CHECK(slope == doctest::Approx(3.0));
    CHECK(intercept == doctest::Approx(std::log(2.0)));
  }
}
