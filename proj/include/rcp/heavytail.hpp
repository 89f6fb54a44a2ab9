#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/math/tools/roots.hpp>

#include "rcp/detail/quadrature.hpp"
#include "rcp/error.hpp"

namespace rcp {

// Waiting times beyond this are stored as +infinity: the simulation only
// ever compares them against finite horizons.
inline constexpr double kTimeCap = 1e300;
inline constexpr double kBeyondHorizon = std::numeric_limits<double>::infinity();

enum class Family { plain, log_corrected };

inline std::string_view to_string(Family f) {
  return f == Family::plain ? "plain" : "logcorrected";
}

inline Family parse_family(std::string_view s) {
  if (s == "plain") return Family::plain;
  if (s == "logcorrected" || s == "log_corrected") return Family::log_corrected;
  throw InputError("unknown distribution family '" + std::string(s) +
                   "' (expected plain or logcorrected)");
}

// Waiting-time law with regularly varying tail P(T > t) = L(t) t^-alpha.
//   plain:         P(T > t) = (1+t)^-alpha
//   log_corrected: P(T > t) = (1+t)^-alpha * log(e+t)^-kappa
struct HeavyTailSpec {
  double alpha = 0.75;
  Family family = Family::plain;
  double kappa = 0.0;

  static HeavyTailSpec plain(double alpha) { return {alpha, Family::plain, 0.0}; }
  static HeavyTailSpec log_corrected(double alpha, double kappa) {
    return {alpha, Family::log_corrected, kappa};
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      std::ostringstream os;
      os << "cure index alpha must lie in (0,1), got " << alpha;
      throw InputError(os.str());
    }
    if (family == Family::log_corrected && !(kappa >= 0.0 && std::isfinite(kappa))) {
      std::ostringstream os;
      os << "log-correction exponent kappa must be >= 0, got " << kappa;
      throw InputError(os.str());
    }
  }

  friend bool operator==(const HeavyTailSpec&, const HeavyTailSpec&) = default;
};

namespace detail {

inline void require_time(double t, std::string_view what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << what << " must be a finite time >= 0, got " << t;
    throw InputError(os.str());
  }
}

// log(log(e + t)) evaluated from s = log1p(t) without overflowing e^s.
inline double log_log_e_plus(double s) {
  const double log_e_plus = s < 30.0 ? std::log(std::numbers::e + std::expm1(s))
                                     : s + std::log1p((std::numbers::e - 1.0) * std::exp(-s));
  return std::log(log_e_plus);
}

// -log P(T > t) as a function of s = log1p(t).
inline double neg_log_tail_of_log1p(const HeavyTailSpec& spec, double s) {
  double v = spec.alpha * s;
  if (spec.family == Family::log_corrected && spec.kappa > 0.0) {
    v += spec.kappa * log_log_e_plus(s);
  }
  return v;
}

}  // namespace detail

// P(T > t).
inline double tail(const HeavyTailSpec& spec, double t) {
  detail::require_time(t, "tail: t");
  return std::exp(-detail::neg_log_tail_of_log1p(spec, std::log1p(t)));
}

// m(t) = integral of P(T > x) over [0, t].
inline double truncated_mean(const HeavyTailSpec& spec, double t) {
  detail::require_time(t, "truncated_mean: t");
  if (t == 0.0) return 0.0;
  const double beta = 1.0 - spec.alpha;
  if (spec.family == Family::plain || spec.kappa == 0.0) {
    return std::expm1(beta * std::log1p(t)) / beta;
  }
  // Substitute x = e^s - 1; the integrand e^{s} P(T > e^s - 1) is smooth in s.
  const double upper = std::log1p(t);
  auto integrand = [&](double s) {
    return std::exp(s - detail::neg_log_tail_of_log1p(spec, s));
  };
  return detail::integrate_smooth(integrand, 0.0, upper, 1e-10, "truncated_mean");
}

// Inverse transform: the unique t with P(T > t) = u. Results beyond kTimeCap
// come back as +infinity.
inline double sample(const HeavyTailSpec& spec, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os << "sample: u must lie in (0,1), got " << u;
    throw InputError(os.str());
  }
  const double target = -std::log(u);  // > 0
  double s = target / spec.alpha;      // root for the plain family, upper bracket otherwise
  if (spec.family == Family::log_corrected && spec.kappa > 0.0) {
    auto f = [&](double x) { return detail::neg_log_tail_of_log1p(spec, x) - target; };
    boost::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, s, -target, f(s), tol, max_iter);
    if (max_iter >= 200) {
      std::ostringstream os;
      os << "sample: inversion of the log-corrected tail did not converge for u=" << u;
      throw NumericError(os.str());
    }
    s = 0.5 * (lo + hi);
  }
  if (s > std::log(kTimeCap)) return kBeyondHorizon;
  return std::expm1(s);
}

// P(T > s + t | T > s).
inline double conditional_survival(const HeavyTailSpec& spec, double s, double t) {
  detail::require_time(s, "conditional_survival: s");
  detail::require_time(t, "conditional_survival: t");
  if (t == 0.0) return 1.0;
  return std::exp(detail::neg_log_tail_of_log1p(spec, std::log1p(s)) -
                  detail::neg_log_tail_of_log1p(spec, std::log1p(s + t)));
}

}  // namespace rcp
