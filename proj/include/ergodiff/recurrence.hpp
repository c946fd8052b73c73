#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ergodiff/drift_fields.hpp"

namespace ergodiff {

/// Radial envelopes beta_upper(r) = sup_{|x|=r} (d - 1 + C(x)) and beta_lower (the inf).
/// Closed-form profiles also carry their antiderivatives I(r) = int_{r0}^r beta(u)/u du.
class RadialProfile {
 public:
  using Envelope = std::function<double(double)>;
  using Antiderivative = std::function<double(double r0, double r)>;

  RadialProfile(std::string id, std::size_t dim, Envelope upper, Envelope lower,
                std::optional<Antiderivative> i_upper = std::nullopt,
                std::optional<Antiderivative> i_lower = std::nullopt);

  const std::string& id() const { return id_; }
  std::size_t dim() const { return dim_; }
  bool closed_form() const { return i_upper_.has_value() && i_lower_.has_value(); }

  double beta_upper(double r) const { return upper_(r); }
  double beta_lower(double r) const { return lower_(r); }
  const std::optional<Antiderivative>& i_upper_closed() const { return i_upper_; }
  const std::optional<Antiderivative>& i_lower_closed() const { return i_lower_; }

  /// Same envelopes with the closed-form antiderivatives removed, forcing quadrature.
  RadialProfile without_closed_form() const;

 private:
  std::string id_;
  std::size_t dim_;
  Envelope upper_;
  Envelope lower_;
  std::optional<Antiderivative> i_upper_;
  std::optional<Antiderivative> i_lower_;
};

/// Standard Brownian motion, beta = d - 1.
RadialProfile brownian_profile(std::size_t dim);
/// b = -grad V, V = -r^-alpha.
RadialProfile power_well_profile(std::size_t dim, double alpha);
/// b = -grad V, V = r^alpha.
RadialProfile power_attractive_profile(std::size_t dim, double alpha);
/// The z^4 drift: beta = 1 +- 8 r^4.
RadialProfile z4_profile();
/// Zero drift in d = 1 with I == 0, a toy case for the cr5 quotient.
RadialProfile flat_profile();

struct Envelopes {
  double upper = 0.0;
  double lower = 0.0;
};

/// sup / inf of d - 1 + C over the sphere |x| = r, for d = 1 (two points) or d = 2
/// (n_angles grid, then golden-section refinement around the discrete extrema).
Envelopes sampled_envelopes(const std::function<double(const Eigen::VectorXd&)>& c_of_x, std::size_t dim, double r,
                            std::size_t n_angles = 256);

template <typename Field>
Envelopes envelopes(const Field& field, double r, std::size_t n_angles = 256) {
  return sampled_envelopes([&](const Eigen::VectorXd& x) { return c_function(field, x); }, field.dim(), r,
                           n_angles);
}

/// Envelope profile sampled from a drift field on circles.
template <typename Field>
RadialProfile sampled_profile(const Field& field, std::size_t n_angles = 256) {
  auto c_of_x = [field](const Eigen::VectorXd& x) { return c_function(field, x); };
  const std::size_t dim = field.dim();
  return RadialProfile(
      "sampled:" + std::string(field.name()), dim,
      [=](double r) { return sampled_envelopes(c_of_x, dim, r, n_angles).upper; },
      [=](double r) { return sampled_envelopes(c_of_x, dim, r, n_angles).lower; });
}

/// Cubic Hermite interpolation of the envelopes in s = ln r on [r_min, r_max], with I integrated
/// exactly from the interpolant. Turns a sampled profile into one with closed-form I. Outside the
/// range the envelopes fall back to the source and I throws std::domain_error.
RadialProfile tabulated_profile(const RadialProfile& source, double r_min, double r_max,
                                int nodes_per_efold = 200);

enum class Envelope { upper, lower };

/// I(r) = int_{r0}^r beta(u)/u du, closed form when the profile has one.
double i_integral(const RadialProfile& profile, Envelope which, double r0, double r);
/// Always by adaptive quadrature; throws QuadratureError on non-convergence.
double i_integral_numeric(const RadialProfile& profile, Envelope which, double r0, double r);

enum class OuterSign { exp_minus_upper, exp_minus_lower, exp_plus_upper };

/// log int_{r0}^N exp(+-I(u)) du, accumulated in the log domain.
double outer_integral_logdomain(const RadialProfile& profile, OuterSign sign, double r0, double n);
double outer_integral_logdomain(const RadialProfile& profile, OuterSign sign, double r0, double from, double to);

struct Cr5Quotient {
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  double log_quotient() const { return log_numerator - log_denominator; }
};

/// Numerator int_{r0}^N exp(-I_up(s)) (int_{r0}^s exp(I_up(u)) du) ds and denominator
/// int_{r0}^N exp(-I_low(u)) du, both as logarithms.
Cr5Quotient cr5_quotient(const RadialProfile& profile, double r0, double n);

enum class Criterion { cr1, cr2, cr4, cr5 };
enum class Verdict { holds, fails, inconclusive };
enum class Summary { recurrent, transient, positive_recurrent, inconclusive };

std::string to_string(Criterion c);
std::string to_string(Verdict v);
std::string to_string(Summary s);

/// Thresholds of the divergence heuristics. Defaults: schedule r0 * 2^k for k = 1..12,
/// blow-up at log value 50, convergence at relative tail increment 1e-8.
struct ClassifierSettings {
  double r0 = 1.0;
  int doublings = 12;
  double blowup_log = 50.0;
  double tail_ratio = 1e-8;
  /// Increments shrinking by at least this factor per doubling over the last three
  /// doublings are read as a convergent geometric tail.
  double geometric_ratio = 0.75;
  /// cr5 quotient ratio per doubling read as growth to infinity (or its inverse as decay).
  double cr5_growth = 1.5;
  /// Relative slack when testing increments for being non-decreasing.
  double increment_slack = 1e-6;
};

struct CriterionVerdict {
  Criterion criterion = Criterion::cr1;
  Verdict verdict = Verdict::inconclusive;
  /// (upper limit N, log of the partial value); for cr5, log of the quotient.
  std::vector<std::pair<double, double>> evidence;
  double r0 = 1.0;
  std::string rule;
};

CriterionVerdict criterion_verdict(const RadialProfile& profile, Criterion criterion,
                                   const ClassifierSettings& settings = {});

struct ClassificationReport {
  std::string profile;
  double r0 = 1.0;
  std::vector<CriterionVerdict> criteria;
  Summary summary = Summary::inconclusive;
  std::string notes;

  const CriterionVerdict& verdict(Criterion c) const;
  bool recurrent() const {
    return summary == Summary::recurrent || summary == Summary::positive_recurrent;
  }
};

ClassificationReport classify(const RadialProfile& profile, const ClassifierSettings& settings = {});

std::string report_to_json(const ClassificationReport& report);
std::string report_to_table(const ClassificationReport& report);

/// Divergence form of the stationary Fokker-Planck operator applied to exp(-2V),
/// div((1/2) grad - b) exp(-2V), for the gradient drift of a radial power potential,
/// assembled coordinate by coordinate from exact derivatives of V.
double stationary_density_residual(const RadialPowerField& field, const Eigen::VectorXd& x);

}  // namespace ergodiff
