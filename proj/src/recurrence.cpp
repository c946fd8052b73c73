#include "ergodiff/recurrence.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ergodiff/log_math.hpp"
#include "ergodiff/quadrature.hpp"

namespace ergodiff {

RadialProfile::RadialProfile(std::string id, std::size_t dim, Envelope upper, Envelope lower,
                             std::optional<Antiderivative> i_upper, std::optional<Antiderivative> i_lower)
    : id_(std::move(id)),
      dim_(dim),
      upper_(std::move(upper)),
      lower_(std::move(lower)),
      i_upper_(std::move(i_upper)),
      i_lower_(std::move(i_lower)) {
  if (dim_ == 0) throw std::invalid_argument("profile dimension must be positive");
}

RadialProfile RadialProfile::without_closed_form() const { return RadialProfile(id_, dim_, upper_, lower_); }

namespace {

std::string profile_name(const char* kind, std::size_t dim, double alpha) {
  std::ostringstream os;
  os << kind << "(d=" << dim << ",alpha=" << alpha << ")";
  return os.str();
}

}  // namespace

RadialProfile brownian_profile(std::size_t dim) {
  const double k = static_cast<double>(dim) - 1.0;
  auto beta = [k](double) { return k; };
  auto i = [k](double r0, double r) { return k * std::log(r / r0); };
  return RadialProfile("brownian(d=" + std::to_string(dim) + ")", dim, beta, beta, i, i);
}

RadialProfile power_well_profile(std::size_t dim, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double k = static_cast<double>(dim) - 1.0;
  auto beta = [k, alpha](double r) { return k - 2.0 * alpha * std::pow(r, -alpha); };
  auto i = [k, alpha](double r0, double r) {
    return k * std::log(r / r0) + 2.0 * (std::pow(r, -alpha) - std::pow(r0, -alpha));
  };
  return RadialProfile(profile_name("power-well", dim, alpha), dim, beta, beta, i, i);
}

RadialProfile power_attractive_profile(std::size_t dim, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double k = static_cast<double>(dim) - 1.0;
  auto beta = [k, alpha](double r) { return k - 2.0 * alpha * std::pow(r, alpha); };
  auto i = [k, alpha](double r0, double r) {
    return k * std::log(r / r0) - 2.0 * (std::pow(r, alpha) - std::pow(r0, alpha));
  };
  return RadialProfile(profile_name("power-attractive", dim, alpha), dim, beta, beta, i, i);
}

RadialProfile z4_profile() {
  auto r4 = [](double r) { return (r * r) * (r * r); };
  return RadialProfile(
      "z4", 2, [=](double r) { return 1.0 + 8.0 * r4(r); }, [=](double r) { return 1.0 - 8.0 * r4(r); },
      [=](double r0, double r) { return std::log(r / r0) + 2.0 * (r4(r) - r4(r0)); },
      [=](double r0, double r) { return std::log(r / r0) - 2.0 * (r4(r) - r4(r0)); });
}

RadialProfile flat_profile() {
  auto beta = [](double) { return 0.0; };
  auto i = [](double, double) { return 0.0; };
  return RadialProfile("flat(d=1)", 1, beta, beta, i, i);
}

namespace {

template <typename F>
double golden_section_max(F f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

Envelopes sampled_envelopes(const std::function<double(const Eigen::VectorXd&)>& c_of_x, std::size_t dim, double r,
                            std::size_t n_angles) {
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  const double base = static_cast<double>(dim) - 1.0;
  if (dim == 1) {
    Eigen::VectorXd x(1);
    x(0) = r;
    const double right = base + c_of_x(x);
    x(0) = -r;
    const double left = base + c_of_x(x);
    return {std::max(left, right), std::min(left, right)};
  }
  if (dim != 2) throw std::invalid_argument("sampled envelopes support d = 1 or d = 2");
  if (n_angles < 8) throw std::invalid_argument("need at least 8 angles");

  auto on_circle = [&](double phi) {
    Eigen::VectorXd x(2);
    x << r * std::cos(phi), r * std::sin(phi);
    return base + c_of_x(x);
  };
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n_angles);
  std::size_t i_max = 0, i_min = 0;
  double v_max = -std::numeric_limits<double>::infinity();
  double v_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_angles; ++i) {
    const double v = on_circle(-std::numbers::pi + step * static_cast<double>(i));
    if (v > v_max) v_max = v, i_max = i;
    if (v < v_min) v_min = v, i_min = i;
  }
  constexpr double kAngleTol = 1e-10;
  const double phi_max = -std::numbers::pi + step * static_cast<double>(i_max);
  const double phi_min = -std::numbers::pi + step * static_cast<double>(i_min);
  const double upper = std::max(v_max, golden_section_max(on_circle, phi_max - step, phi_max + step, kAngleTol));
  const double lower = std::min(
      v_min, -golden_section_max([&](double phi) { return -on_circle(phi); }, phi_min - step, phi_min + step, kAngleTol));
  return {upper, lower};
}

namespace {

// One envelope on the grid s_i = s0 + i h: node values, slopes d beta/ds and the running
// integral J_i = int_{s0}^{s_i} beta ds.
struct HermiteTable {
  double s0 = 0.0, h = 0.0;
  std::vector<double> value, slope, cumulative;

  std::size_t cell(double s) const {
    const double x = (s - s0) / h;
    const auto last = value.size() - 2;
    if (x <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(x), last);
  }

  double operator()(double s) const {
    const std::size_t i = cell(s);
    const double t = (s - s0) / h - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * value[i] + (t3 - 2 * t2 + t) * h * slope[i] + (-2 * t3 + 3 * t2) * value[i + 1] +
           (t3 - t2) * h * slope[i + 1];
  }

  // int_0^{tau h} of the cell polynomial, tau in [0, 1].
  double partial(std::size_t i, double tau) const {
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau;
    return h * ((t4 / 2 - t3 + tau) * value[i] + h * (t4 / 4 - 2 * t3 / 3 + t2 / 2) * slope[i] +
                (t3 - t4 / 2) * value[i + 1] + h * (t4 / 4 - t3 / 3) * slope[i + 1]);
  }

  double integral_to(double s) const {
    const std::size_t i = cell(s);
    return cumulative[i] + partial(i, (s - s0) / h - static_cast<double>(i));
  }
};

HermiteTable make_table(const std::function<double(double)>& beta, double s0, double h, std::size_t cells) {
  // Two ghost nodes on each side feed the fourth-order central slopes.
  std::vector<double> ext(cells + 5);
  for (std::size_t k = 0; k < ext.size(); ++k) ext[k] = beta(std::exp(s0 + (static_cast<double>(k) - 2.0) * h));
  HermiteTable t;
  t.s0 = s0;
  t.h = h;
  t.value.assign(ext.begin() + 2, ext.end() - 2);
  t.slope.resize(t.value.size());
  for (std::size_t i = 0; i < t.value.size(); ++i) {
    const std::size_t k = i + 2;
    t.slope[i] = (ext[k - 2] - 8 * ext[k - 1] + 8 * ext[k + 1] - ext[k + 2]) / (12 * h);
  }
  t.cumulative.assign(t.value.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.value.size(); ++i) t.cumulative[i + 1] = t.cumulative[i] + t.partial(i, 1.0);
  return t;
}

}  // namespace

RadialProfile tabulated_profile(const RadialProfile& source, double r_min, double r_max, int nodes_per_efold) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("need 0 < r_min < r_max");
  if (nodes_per_efold < 4) throw std::invalid_argument("need at least 4 nodes per e-fold");
  const double s0 = std::log(r_min), s1 = std::log(r_max);
  const auto cells = static_cast<std::size_t>(std::ceil((s1 - s0) * nodes_per_efold));
  const double h = (s1 - s0) / static_cast<double>(cells);
  auto upper = std::make_shared<const HermiteTable>(
      make_table([&](double r) { return source.beta_upper(r); }, s0, h, cells));
  auto lower = std::make_shared<const HermiteTable>(
      make_table([&](double r) { return source.beta_lower(r); }, s0, h, cells));
  // Slack for rounding in the range check.
  const double lo = r_min * (1 - 1e-12), hi = r_max * (1 + 1e-12);
  auto envelope = [lo, hi](std::shared_ptr<const HermiteTable> t, RadialProfile::Envelope fallback) {
    return [=](double r) { return r >= lo && r <= hi ? (*t)(std::log(r)) : fallback(r); };
  };
  auto antiderivative = [lo, hi](std::shared_ptr<const HermiteTable> t) {
    return [=](double r0, double r) {
      if (r0 < lo || r > hi || r < lo || r0 > hi) throw std::domain_error("radius outside the tabulated range");
      return t->integral_to(std::log(r)) - t->integral_to(std::log(r0));
    };
  };
  RadialProfile::Envelope up_src = [source](double r) { return source.beta_upper(r); };
  RadialProfile::Envelope low_src = [source](double r) { return source.beta_lower(r); };
  return RadialProfile(source.id(), source.dim(), envelope(upper, up_src), envelope(lower, low_src),
                       antiderivative(upper), antiderivative(lower));
}

double i_integral_numeric(const RadialProfile& profile, Envelope which, double r0, double r) {
  if (!(r0 > 0.0) || r < r0) throw std::domain_error("need 0 < r0 <= r");
  if (r == r0) return 0.0;
  auto integrand = [&](double u) {
    return (which == Envelope::upper ? profile.beta_upper(u) : profile.beta_lower(u)) / u;
  };
  const auto res = integrate(integrand, r0, r, 1e-13, 1e-13);
  if (!res.converged && res.error > 1e-10 * std::max(1.0, std::abs(res.value)))
    throw QuadratureError("I(r) quadrature did not converge");
  return res.value;
}

double i_integral(const RadialProfile& profile, Envelope which, double r0, double r) {
  if (!(r0 > 0.0) || r < r0) throw std::domain_error("need 0 < r0 <= r");
  const auto& closed = which == Envelope::upper ? profile.i_upper_closed() : profile.i_lower_closed();
  if (closed) return (*closed)(r0, r);
  return i_integral_numeric(profile, which, r0, r);
}

namespace {

// I(u) for u >= r0; below r0 the closed forms extend naturally, numeric integration flips sign.
double i_any(const RadialProfile& profile, Envelope which, double r0, double u) {
  const auto& closed = which == Envelope::upper ? profile.i_upper_closed() : profile.i_lower_closed();
  if (closed) return (*closed)(r0, u);
  return u >= r0 ? i_integral_numeric(profile, which, r0, u) : -i_integral_numeric(profile, which, u, r0);
}

double beta(const RadialProfile& profile, Envelope which, double u) {
  return which == Envelope::upper ? profile.beta_upper(u) : profile.beta_lower(u);
}

LogIntegrand outer_integrand(const RadialProfile& profile, OuterSign sign, double r0) {
  const Envelope which = sign == OuterSign::exp_minus_lower ? Envelope::lower : Envelope::upper;
  const double s = sign == OuterSign::exp_plus_upper ? 1.0 : -1.0;
  return {[=, &profile](double u) { return s * i_any(profile, which, r0, u); },
          [=, &profile](double u) { return s * beta(profile, which, u) / u; }};
}

constexpr double kOuterRelTol = 1e-11;

}  // namespace

double outer_integral_logdomain(const RadialProfile& profile, OuterSign sign, double r0, double from, double to) {
  if (!(r0 > 0.0) || from < r0 || to < from) throw std::domain_error("need 0 < r0 <= from <= to");
  return log_integrate(outer_integrand(profile, sign, r0), from, to, kOuterRelTol).log_value;
}

double outer_integral_logdomain(const RadialProfile& profile, OuterSign sign, double r0, double n) {
  if (!(n > r0)) throw std::domain_error("need N > r0");
  return outer_integral_logdomain(profile, sign, r0, r0, n);
}

namespace {

// Running state of the cr5 quotient. The inner integral G(s) = int_{r0}^s exp(I_up) is
// carried across segments as a log-sum-exp so each segment only integrates from its left end.
class Cr5Accumulator {
 public:
  Cr5Accumulator(const RadialProfile& profile, double r0) : profile_(profile), r0_(r0), at_(r0) {}

  void advance_to(double n) {
    if (n <= at_) return;
    const double left = at_;
    const double log_g_left = log_inner_;
    const LogIntegrand inner = outer_integrand(profile_, OuterSign::exp_plus_upper, r0_);
    auto log_g = [&](double s) {
      return log_add_exp(log_g_left, log_integrate(inner, left, s, 1e-10).log_value);
    };
    const LogIntegrand numer{
        [&](double s) { return -i_any(profile_, Envelope::upper, r0_, s) + log_g(s); },
        [&](double s) {
          const double i_up = i_any(profile_, Envelope::upper, r0_, s);
          return -beta(profile_, Envelope::upper, s) / s + std::exp(i_up - log_g(s));
        }};
    log_numerator_ = log_add_exp(log_numerator_, log_integrate(numer, left, n, 1e-9).log_value);
    log_inner_ = log_g(n);
    log_denominator_ = log_add_exp(log_denominator_,
                                   outer_integral_logdomain(profile_, OuterSign::exp_minus_lower, r0_, left, n));
    at_ = n;
  }

  Cr5Quotient value() const { return {log_numerator_, log_denominator_}; }

 private:
  const RadialProfile& profile_;
  double r0_;
  double at_;
  double log_inner_ = kLogZero;
  double log_numerator_ = kLogZero;
  double log_denominator_ = kLogZero;
};

}  // namespace

Cr5Quotient cr5_quotient(const RadialProfile& profile, double r0, double n) {
  if (!(r0 > 0.0) || !(n > r0)) throw std::domain_error("need 0 < r0 < N");
  Cr5Accumulator acc(profile, r0);
  for (double knot = 2.0 * r0; knot < n; knot *= 2.0) acc.advance_to(knot);
  acc.advance_to(n);
  return acc.value();
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::cr1: return "cr1";
    case Criterion::cr2: return "cr2";
    case Criterion::cr4: return "cr4";
    case Criterion::cr5: return "cr5";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Summary s) {
  switch (s) {
    case Summary::recurrent: return "recurrent";
    case Summary::transient: return "transient";
    case Summary::positive_recurrent: return "positive_recurrent";
    case Summary::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct Trend {
  bool diverging = false;
  bool converging = false;
  std::string rule;
};

// partial[k], increment[k] are logs of int_{r0}^{N_k} and int_{N_{k-1}}^{N_k}.
Trend read_trend(const std::vector<double>& partial, const std::vector<double>& increment,
                 const ClassifierSettings& s) {
  Trend t;
  const std::size_t k = partial.size();
  if (partial.back() > s.blowup_log) {
    t.diverging = true;
    t.rule = "log partial value exceeds blow-up bound";
    return t;
  }
  if (increment.back() - partial.back() < std::log(s.tail_ratio)) {
    t.converging = true;
    t.rule = "relative tail increment over the last doubling below threshold";
    return t;
  }
  if (k >= 4) {
    const double slack = std::log1p(s.increment_slack);
    bool nondecreasing = true;
    bool geometric = true;
    for (std::size_t i = k - 3; i < k; ++i) {
      nondecreasing = nondecreasing && increment[i] + slack >= increment[i - 1];
      geometric = geometric && increment[i] - increment[i - 1] <= std::log(s.geometric_ratio);
    }
    if (nondecreasing) {
      t.diverging = true;
      t.rule = "increments non-decreasing over the last three doublings";
    } else if (geometric) {
      t.converging = true;
      t.rule = "increments decay geometrically over the last three doublings";
    }
  }
  if (t.rule.empty()) t.rule = "no trend detected along the schedule";
  return t;
}

}  // namespace

CriterionVerdict criterion_verdict(const RadialProfile& profile, Criterion criterion,
                                   const ClassifierSettings& settings) {
  if (!(settings.r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  if (settings.doublings < 1) throw std::invalid_argument("schedule needs at least one doubling");
  CriterionVerdict out;
  out.criterion = criterion;
  out.r0 = settings.r0;

  if (criterion == Criterion::cr5) {
    Cr5Accumulator acc(profile, settings.r0);
    std::vector<double> log_q;
    double n = settings.r0;
    for (int k = 1; k <= settings.doublings; ++k) {
      n *= 2.0;
      acc.advance_to(n);
      log_q.push_back(acc.value().log_quotient());
      out.evidence.emplace_back(n, log_q.back());
    }
    const double step = std::log(settings.cr5_growth);
    bool growing = log_q.size() >= 4;
    bool decaying = growing;
    for (std::size_t i = log_q.size() >= 4 ? log_q.size() - 3 : log_q.size(); i < log_q.size(); ++i) {
      growing = growing && log_q[i] - log_q[i - 1] >= step;
      decaying = decaying && log_q[i] - log_q[i - 1] <= -step;
    }
    if (growing) {
      out.verdict = Verdict::holds;
      out.rule = "quotient grows by the growth factor over each of the last three doublings";
    } else if (decaying) {
      out.verdict = Verdict::fails;
      out.rule = "quotient decays by the growth factor over each of the last three doublings";
    } else {
      out.verdict = Verdict::inconclusive;
      out.rule = "no monotone trend of the quotient";
    }
    return out;
  }

  const OuterSign sign = criterion == Criterion::cr1   ? OuterSign::exp_minus_upper
                         : criterion == Criterion::cr2 ? OuterSign::exp_minus_lower
                                                       : OuterSign::exp_plus_upper;
  std::vector<double> partial, increment;
  double left = settings.r0;
  double running = kLogZero;
  for (int k = 1; k <= settings.doublings; ++k) {
    const double right = 2.0 * left;
    const double inc = outer_integral_logdomain(profile, sign, settings.r0, left, right);
    running = log_add_exp(running, inc);
    increment.push_back(inc);
    partial.push_back(running);
    out.evidence.emplace_back(right, running);
    left = right;
  }
  const Trend trend = read_trend(partial, increment, settings);
  out.rule = trend.rule;
  // cr1 asks for divergence; cr2 and cr4 ask for convergence.
  const bool wants_divergence = criterion == Criterion::cr1;
  if (trend.diverging) {
    out.verdict = wants_divergence ? Verdict::holds : Verdict::fails;
  } else if (trend.converging) {
    out.verdict = wants_divergence ? Verdict::fails : Verdict::holds;
  } else {
    out.verdict = Verdict::inconclusive;
  }
  return out;
}

const CriterionVerdict& ClassificationReport::verdict(Criterion c) const {
  for (const auto& v : criteria) {
    if (v.criterion == c) return v;
  }
  throw std::out_of_range("criterion not in report");
}

ClassificationReport classify(const RadialProfile& profile, const ClassifierSettings& settings) {
  ClassificationReport report;
  report.profile = profile.id();
  report.r0 = settings.r0;
  for (Criterion c : {Criterion::cr1, Criterion::cr2, Criterion::cr4, Criterion::cr5})
    report.criteria.push_back(criterion_verdict(profile, c, settings));

  const bool cr1 = report.verdict(Criterion::cr1).verdict == Verdict::holds;
  const bool cr2 = report.verdict(Criterion::cr2).verdict == Verdict::holds;
  const bool cr4 = report.verdict(Criterion::cr4).verdict == Verdict::holds;
  const bool cr5 = report.verdict(Criterion::cr5).verdict == Verdict::holds;

  std::ostringstream notes;
  notes << "Verdicts come from a numerical trend heuristic along the schedule N = r0 * 2^k, k = 1.."
        << settings.doublings << ". The criteria need only hold for some r0 > 0; a failure at r0 = " << settings.r0
        << " does not rule out another r0.";
  if (cr1 && cr2) {
    report.summary = Summary::inconclusive;
    notes << " cr1 and cr2 both read as holding, which is contradictory; the schedule is too short to decide.";
  } else if (cr2) {
    report.summary = Summary::transient;
  } else if (cr1 && cr4) {
    report.summary = Summary::positive_recurrent;
  } else if (cr1) {
    report.summary = Summary::recurrent;
    if (cr5) notes << " cr5 holds: the process admits no finite invariant measure (null recurrent).";
  } else {
    report.summary = Summary::inconclusive;
    notes << " Neither the recurrence criterion cr1 nor the transience criterion cr2 applies";
    if (report.verdict(Criterion::cr5).verdict == Verdict::fails)
      notes << ", and the cr5 quotient tends to 0, so even under recurrence the existence of a finite"
               " invariant measure cannot be decided by these criteria";
    notes << ".";
  }
  report.notes = notes.str();
  return report;
}

std::string report_to_json(const ClassificationReport& report) {
  nlohmann::ordered_json j;
  j["profile"] = report.profile;
  j["r0"] = report.r0;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : report.criteria) {
    nlohmann::ordered_json entry;
    entry["name"] = to_string(c.criterion);
    entry["verdict"] = to_string(c.verdict);
    entry["rule"] = c.rule;
    entry["evidence"] = nlohmann::ordered_json::array();
    for (const auto& [n, v] : c.evidence) entry["evidence"].push_back({n, v});
    j["criteria"].push_back(entry);
  }
  j["summary"] = to_string(report.summary);
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string report_to_table(const ClassificationReport& report) {
  std::ostringstream os;
  os << "profile: " << report.profile << "   r0 = " << report.r0 << "\n";
  os << std::left << std::setw(10) << "criterion" << std::setw(14) << "verdict" << std::setw(12) << "N_last"
     << std::setw(24) << "log value at N_last"
     << "rule\n";
  for (const auto& c : report.criteria) {
    os << std::left << std::setw(10) << to_string(c.criterion) << std::setw(14) << to_string(c.verdict);
    if (!c.evidence.empty()) {
      os << std::setw(12) << c.evidence.back().first << std::setw(24) << std::setprecision(10)
         << c.evidence.back().second << std::setprecision(6);
    }
    os << c.rule << "\n";
  }
  os << "summary: " << to_string(report.summary) << "\n";
  os << "notes: " << report.notes << "\n";
  return os.str();
}

double stationary_density_residual(const RadialPowerField& field, const Eigen::VectorXd& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw std::domain_error("stationary density check needs x != 0");
  const double rho = std::exp(-2.0 * field.potential(r));
  // grad V = g(r) x, Hessian V = g I + (g'(r)/r) x x^T with g = alpha r^p.
  const double g = field.gradient_factor(r);
  const double p = field.kind() == PowerPotential::attractive ? field.alpha() - 2.0 : -field.alpha() - 2.0;
  const double dg_over_r = p * g / (r * r);
  double residual = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v_i = g * x(i);
    const double v_ii = g + dg_over_r * x(i) * x(i);
    const double rho_i = -2.0 * rho * v_i;
    const double rho_ii = -2.0 * (rho_i * v_i + rho * v_ii);
    const double b_i = -v_i;
    const double db_i = -v_ii;
    residual += 0.5 * rho_ii - (db_i * rho + b_i * rho_i);
  }
  return residual;
}

}  // namespace ergodiff
