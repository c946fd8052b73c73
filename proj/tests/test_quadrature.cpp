#include <doctest.h>

#include <cmath>
#include <vector>

#include "ergodiff/log_math.hpp"
#include "ergodiff/quadrature.hpp"

using namespace ergodiff;

TEST_SUITE("quadrature") {
  TEST_CASE("log-sum-exp helpers") {
    CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_add_exp(kLogZero, 3.0) == 3.0);
    CHECK(log_sub_exp(std::log(5.0), std::log(2.0)) == doctest::Approx(std::log(3.0)));
    CHECK(log_sub_exp(2.0, 2.0) == kLogZero);
    const std::vector<double> xs{800.0, 800.0, 800.0};
    CHECK(log_sum_exp(xs) == doctest::Approx(800.0 + std::log(3.0)));
    CHECK(log_sum_exp(std::vector<double>{}) == kLogZero);
    CHECK(materializable(299.0));
    CHECK_FALSE(materializable(-301.0));
  }

  TEST_CASE("Gauss-Kronrod on smooth integrands") {
    const auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-14, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    const auto l = integrate([](double x) { return 1.0 / x; }, 1.0, 1000.0, 1e-14, 1e-12);
    CHECK(l.value == doctest::Approx(std::log(1000.0)).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-12, 1e-12).value == 0.0);
  }

  TEST_CASE("reports non-convergence when panels run out") {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-15, 1e-15, 5);
    CHECK_FALSE(r.converged);
  }

  TEST_CASE("log-domain integral of a moderate integrand") {
    // int_0^1 e^u du = e - 1
    const LogIntegrand g{[](double u) { return u; }, [](double) { return 1.0; }};
    const auto r = log_integrate(g, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.log_value == doctest::Approx(std::log(std::expm1(1.0))).epsilon(1e-12));
  }

  TEST_CASE("log-domain integral far beyond double range") {
    // int_1^N e^{2u^4} du ~ e^{2N^4} / (8 N^3), N = 10 gives exponent 20000.
    const double n = 10.0;
    const LogIntegrand g{[](double u) { return 2.0 * std::pow(u, 4); },
                         [](double u) { return 8.0 * std::pow(u, 3); }};
    const auto r = log_integrate(g, 1.0, n);
    CHECK(std::isfinite(r.log_value));
    const double lead = 2.0 * std::pow(n, 4) - std::log(8.0 * n * n * n);
    // Next asymptotic term: relative correction 3 / (8 N^4).
    CHECK(r.log_value == doctest::Approx(lead + std::log1p(3.0 / (8.0 * std::pow(n, 4)))).epsilon(1e-9));
    CHECK(r.linearized_panels > 0);
  }

  TEST_CASE("log-domain integral of a decaying integrand") {
    // int_0^inf-ish e^{-u} on [0, 800] = 1 - e^{-800}
    const LogIntegrand g{[](double u) { return -u; }, [](double) { return -1.0; }};
    const auto r = log_integrate(g, 0.0, 800.0);
    CHECK(r.log_value == doctest::Approx(0.0).epsilon(1e-10));
  }

  TEST_CASE("empty and reversed intervals") {
    const LogIntegrand g{[](double u) { return u; }, [](double) { return 1.0; }};
    CHECK(log_integrate(g, 1.0, 1.0).log_value == kLogZero);
    CHECK_FALSE(log_integrate(g, 2.0, 1.0).converged);
  }
}
