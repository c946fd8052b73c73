#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

#include "ergodiff/drift_fields.hpp"
#include "ergodiff/recurrence.hpp"

using namespace ergodiff;

namespace {

Verdict verdict_of(const ClassificationReport& r, Criterion c) { return r.verdict(c).verdict; }

}  // namespace

TEST_SUITE("recurrence") {
  TEST_CASE("sampled envelopes of the z4 field match 1 +- 8 r^4") {
    const auto b = make_z4_field();
    for (double r : {0.5, 1.0, 2.0, 5.0}) {
      const auto e = envelopes(b, r);
      const double r4 = r * r * r * r;
      CHECK(std::abs(e.upper - (1 + 8 * r4)) <= 1e-6 * std::abs(1 + 8 * r4));
      CHECK(std::abs(e.lower - (1 - 8 * r4)) <= 1e-6 * std::abs(1 - 8 * r4));
    }
    const auto e1 = envelopes(b, 1.0);
    CHECK(e1.upper == doctest::Approx(9.0));
    CHECK(e1.lower == doctest::Approx(-7.0));
    const auto e2 = envelopes(b, 2.0);
    CHECK(e2.upper == doctest::Approx(129.0));
    CHECK(e2.lower == doctest::Approx(-127.0));
    const auto z = envelopes(PolyDriftField::zero(2), 3.0);
    CHECK(z.upper == 1.0);
    CHECK(z.lower == 1.0);
  }

  TEST_CASE("envelopes are ordered") {
    const auto p = z4_profile();
    for (double r = 0.1; r < 10; r *= 1.3) CHECK(p.beta_upper(r) >= p.beta_lower(r));
    const auto b = builtin_field("quartic-well");
    for (double r = 0.1; r < 10; r *= 1.3) {
      const auto e = envelopes(b, r);
      CHECK(e.upper >= e.lower);
    }
  }

  TEST_CASE("envelope arguments are checked") {
    CHECK_THROWS(envelopes(make_z4_field(), 0.0));
    CHECK_THROWS(envelopes(make_z4_field(), 1.0, 4));
  }

  TEST_CASE("I integral values") {
    CHECK(i_integral(z4_profile(), Envelope::upper, 1, 2) == doctest::Approx(std::log(2.0) + 30.0));
    CHECK(i_integral(brownian_profile(2), Envelope::upper, 1, std::exp(1.0)) == doctest::Approx(1.0));
    CHECK(i_integral(z4_profile(), Envelope::lower, 1.5, 1.5) == 0.0);
    CHECK_THROWS(i_integral(z4_profile(), Envelope::upper, 2, 1));
  }

  TEST_CASE("numeric I matches the closed forms") {
    std::vector<RadialProfile> profiles{z4_profile()};
    for (std::size_t d = 1; d <= 5; ++d) profiles.push_back(brownian_profile(d));
    for (std::size_t d = 1; d <= 4; ++d) profiles.push_back(power_well_profile(d, 1.0));
    for (double a : {1.0, 2.0, 4.0})
      for (std::size_t d = 1; d <= 3; ++d) profiles.push_back(power_attractive_profile(d, a));
    for (const auto& p : profiles) {
      const auto numeric = p.without_closed_form();
      CHECK_FALSE(numeric.closed_form());
      for (double r : {1.3, 2.0, 5.0, 17.0}) {
        for (auto which : {Envelope::upper, Envelope::lower}) {
          const double exact = i_integral(p, which, 1.0, r);
          const double approx = i_integral_numeric(numeric, which, 1.0, r);
          CHECK(std::abs(approx - exact) <= 1e-8 * std::max(1.0, std::abs(exact)));
        }
        CHECK(i_integral(p, Envelope::upper, 1.0, r) >= i_integral(p, Envelope::lower, 1.0, r));
      }
    }
  }

  TEST_CASE("outer integrals in the log domain") {
    const double v = outer_integral_logdomain(z4_profile(), OuterSign::exp_minus_lower, 1, 3);
    CHECK(v >= 150.0);
    CHECK(v <= 162.0);
    CHECK(outer_integral_logdomain(z4_profile(), OuterSign::exp_minus_upper, 1, 3, 4) < std::log(1e-60));
    for (double n : {2.0, 10.0, 1000.0}) {
      CHECK(outer_integral_logdomain(brownian_profile(2), OuterSign::exp_minus_upper, 1, n) ==
            doctest::Approx(std::log(std::log(n))).epsilon(1e-9));
    }
    // Far beyond double range, still finite.
    CHECK(std::isfinite(outer_integral_logdomain(z4_profile(), OuterSign::exp_plus_upper, 1, 1000)));
  }

  TEST_CASE("outer integral agrees with the quadrature of the materialized integrand") {
    const auto p = power_attractive_profile(2, 2.0);
    // exp(-I) = (1/u) exp(2(u^2 - 1)) on [1, 3]; direct GK quadrature as oracle.
    const double direct = std::log(
        [] {
          double s = 0.0;
          const int n = 200000;
          const double h = 2.0 / n;
          for (int i = 0; i < n; ++i) {
            const double u = 1.0 + (i + 0.5) * h;
            s += std::exp(2.0 * (u * u - 1.0)) / u * h;
          }
          return s;
        }());
    CHECK(outer_integral_logdomain(p, OuterSign::exp_minus_upper, 1, 3) == doctest::Approx(direct).epsilon(1e-8));
  }

  TEST_CASE("cr5 quotient") {
    const auto flat = cr5_quotient(flat_profile(), 1.0, 5.0);
    CHECK(std::exp(flat.log_quotient()) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::exp(cr5_quotient(flat_profile(), 1.0, 9.0).log_quotient()) == doctest::Approx(4.0).epsilon(1e-10));
    const auto p = power_well_profile(3, 1.0);
    for (double n : {8.0, 16.0, 32.0, 64.0}) {
      const double ratio = std::exp(cr5_quotient(p, 1, 2 * n).log_quotient() - cr5_quotient(p, 1, n).log_quotient());
      CHECK(ratio > 1.5);
    }
    const double q15 = cr5_quotient(z4_profile(), 1, 1.5).log_quotient();
    const double q3 = cr5_quotient(z4_profile(), 1, 3).log_quotient();
    CHECK(q3 - q15 < std::log(1e-10));
    CHECK_THROWS(cr5_quotient(z4_profile(), 1, 1));
  }

  TEST_CASE("classifier regression matrix") {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t d : {1u, 2u}) {
      const auto r = classify(brownian_profile(d));
      CHECK(r.summary == Summary::recurrent);
      CHECK(verdict_of(r, Criterion::cr1) == Verdict::holds);
    }
    for (std::size_t d : {3u, 4u, 5u}) CHECK(classify(brownian_profile(d)).summary == Summary::transient);
    for (std::size_t d : {1u, 2u, 3u, 4u}) {
      const auto r = classify(power_well_profile(d, 1.0));
      CHECK(r.summary == (d <= 2 ? Summary::recurrent : Summary::transient));
      CHECK(verdict_of(r, Criterion::cr5) == Verdict::holds);
    }
    for (double a : {1.0, 2.0, 4.0}) {
      for (std::size_t d : {1u, 2u, 3u}) {
        const auto r = classify(power_attractive_profile(d, a));
        CHECK(verdict_of(r, Criterion::cr1) == Verdict::holds);
        CHECK(verdict_of(r, Criterion::cr4) == Verdict::holds);
        CHECK(r.summary == Summary::positive_recurrent);
      }
    }
    const auto z = classify(z4_profile());
    CHECK(z.summary == Summary::inconclusive);
    CHECK(verdict_of(z, Criterion::cr1) == Verdict::fails);
    CHECK(verdict_of(z, Criterion::cr2) == Verdict::fails);
    CHECK(verdict_of(z, Criterion::cr5) == Verdict::fails);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(seconds < 10.0);
  }

  TEST_CASE("z4 evidence") {
    const auto cr1 = criterion_verdict(z4_profile(), Criterion::cr1);
    REQUIRE(cr1.evidence.size() == 12);
    CHECK(cr1.evidence.back().first == 4096.0);
    const double tail = std::expm1(cr1.evidence.back().second - cr1.evidence[10].second);
    CHECK(tail < 1e-8);
    const auto cr2 = criterion_verdict(z4_profile(), Criterion::cr2);
    CHECK(cr2.evidence.back().second > 50.0);
    for (std::size_t i = 1; i < cr2.evidence.size(); ++i) CHECK(cr2.evidence[i].second >= cr2.evidence[i - 1].second);
  }

  TEST_CASE("sampled profile of the z4 field is also inconclusive on cr1 and cr2") {
    ClassifierSettings s;
    s.doublings = 4;
    const auto p = tabulated_profile(sampled_profile(make_z4_field()), 1.0, 16.0);
    CHECK(criterion_verdict(p, Criterion::cr2, s).verdict == Verdict::fails);
    CHECK(criterion_verdict(p, Criterion::cr1, s).verdict == Verdict::fails);
    const auto closed = criterion_verdict(z4_profile(), Criterion::cr2, s);
    const auto sampled = criterion_verdict(p, Criterion::cr2, s);
    for (std::size_t i = 0; i < closed.evidence.size(); ++i)
      CHECK(sampled.evidence[i].second == doctest::Approx(closed.evidence[i].second).epsilon(1e-6));
  }

  TEST_CASE("tabulated profiles reproduce closed forms") {
    for (const auto& src : {z4_profile(), power_well_profile(3, 1.0), power_attractive_profile(2, 2.0)}) {
      const auto t = tabulated_profile(src.without_closed_form(), 1.0, 4096.0);
      CHECK(t.closed_form());
      for (double r : {1.0, 1.7, 3.0, 40.0, 1000.0, 4096.0}) {
        CHECK(t.beta_upper(r) == doctest::Approx(src.beta_upper(r)).epsilon(1e-9));
        for (auto which : {Envelope::upper, Envelope::lower}) {
          const double exact = i_integral(src, which, 1.0, r);
          CHECK(std::abs(i_integral(t, which, 1.0, r) - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
        }
      }
      CHECK_THROWS_AS(i_integral(t, Envelope::upper, 1.0, 5000.0), std::domain_error);
    }
    const auto quartic = tabulated_profile(sampled_profile(builtin_field("quartic-well")), 1.0, 4096.0);
    CHECK(classify(quartic).summary == Summary::positive_recurrent);
  }

  TEST_CASE("report serialization") {
    const auto r = classify(z4_profile());
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["profile"] == "z4");
    CHECK(j["r0"] == 1.0);
    CHECK(j["summary"] == "inconclusive");
    REQUIRE(j["criteria"].size() == 4);
    CHECK(j["criteria"][0]["name"] == "cr1");
    CHECK(j["criteria"][0]["evidence"][0].size() == 2);
    CHECK_FALSE(j["notes"].get<std::string>().empty());
    const auto table = report_to_table(r);
    CHECK(table.find("summary: inconclusive") != std::string::npos);
  }

  TEST_CASE("stationary density of the power well") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> radius(0.5, 5.0);
    for (std::size_t d : {1u, 2u, 3u}) {
      for (double a : {1.0, 2.0}) {
        const auto field = make_gradient_power_field(d, a, PowerPotential::repulsive_well);
        for (int i = 0; i < 100; ++i) {
          Eigen::VectorXd x(static_cast<Eigen::Index>(d));
          for (auto& c : x) c = g(rng);
          x *= radius(rng) / x.norm();
          CHECK(std::abs(stationary_density_residual(field, x)) < 1e-8);
        }
      }
    }
  }
}
