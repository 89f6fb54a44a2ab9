#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "rcp/detail/quadrature.hpp"
#include "rcp/error.hpp"
#include "rcp/parallel.hpp"
#include "rcp/rng.hpp"

namespace rcp {

namespace detail {

inline void require_open_unit(double alpha, std::string_view what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << what << ": alpha must lie in (0,1), got " << alpha;
    throw InputError(os.str());
  }
}

// Integral of u^-a / (1+u) over [0, z] for 0 <= z <= 1/2, by the alternating
// power series z^{1-a} * sum_k (-z)^k / (k+1-a).
inline double power_head(double a, double z) {
  if (z <= 0.0) return 0.0;
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double term = zk / (k + 1.0 - a);
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-18 * std::abs(sum)) break;
    zk *= z;
  }
  return std::pow(z, 1.0 - a) * sum;
}

}  // namespace detail

// Renewal-theorem constant 1 / (Gamma(alpha) Gamma(2 - alpha)).
inline double c_alpha(double alpha) {
  detail::require_open_unit(alpha, "c_alpha");
  return 1.0 / (std::tgamma(alpha) * std::tgamma(2.0 - alpha));
}

// Normalising constant of the Dynkin-Lamperti density,
// sin(pi alpha) / pi = 1 / (Gamma(alpha) Gamma(1 - alpha)).
inline double dl_normalizer(double alpha) {
  detail::require_open_unit(alpha, "dl_normalizer");
  return std::sin(std::numbers::pi * alpha) / std::numbers::pi;
}

// Which constant multiplies y^-alpha / (1+y). Only `normalized` yields a
// probability density; `renewal_constant` (c_alpha) has total mass 1/(1-alpha)
// and is kept for regression checks.
enum class DlConstant { normalized, renewal_constant };

inline double dl_constant(double alpha, DlConstant c) {
  return c == DlConstant::normalized ? dl_normalizer(alpha) : c_alpha(alpha);
}

// g(x) = integral of y^-alpha / (1+y) over [0, x]; g(inf) = pi / sin(pi alpha).
inline double appendix_g(double alpha, double x) {
  detail::require_open_unit(alpha, "appendix_g");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return std::numbers::pi / std::sin(std::numbers::pi * alpha);
  if (x <= 0.5) return detail::power_head(alpha, x);
  if (x <= 2.0) {
    auto f = [alpha](double y) { return std::pow(y, -alpha) / (1.0 + y); };
    return detail::power_head(alpha, 0.5) + detail::integrate_smooth(f, 0.5, x, 1e-13, "appendix_g");
  }
  // Beyond 2 integrate the tail instead: substituting y = 1/u turns
  // the integral over [x, inf) into a head integral with exponent 1 - alpha.
  return std::numbers::pi / std::sin(std::numbers::pi * alpha) - detail::power_head(1.0 - alpha, 1.0 / x);
}

// Integral of y^-alpha / (1+y) over [x, inf), accurate for large x.
inline double appendix_g_complement(double alpha, double x) {
  detail::require_open_unit(alpha, "appendix_g_complement");
  if (std::isinf(x)) return 0.0;
  if (x > 2.0) return detail::power_head(1.0 - alpha, 1.0 / x);
  return appendix_g(alpha, std::numeric_limits<double>::infinity()) - appendix_g(alpha, x);
}

inline double dl_density(double alpha, double y, DlConstant c = DlConstant::normalized) {
  if (!(y > 0.0)) return 0.0;
  return dl_constant(alpha, c) * std::pow(y, -alpha) / (1.0 + y);
}

// Limit law of E(t)/t: P(Y <= x) with density K y^-alpha / (1+y).
inline double dl_cdf(double alpha, double x, DlConstant c = DlConstant::normalized) {
  if (std::isnan(x)) throw InputError("dl_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  return dl_constant(alpha, c) * appendix_g(alpha, x);
}

// P(Y > x) for the normalised law, without cancellation for large x.
inline double dl_survival(double alpha, double x) {
  if (x <= 0.0) return 1.0;
  return dl_normalizer(alpha) * appendix_g_complement(alpha, x);
}

// Exact draw from the normalised limit law: Y = G1 / G2 with independent
// G1 ~ Gamma(1 - alpha), G2 ~ Gamma(alpha), since Y/(1+Y) ~ Beta(1 - alpha, alpha).
class DlSampler {
 public:
  explicit DlSampler(double alpha) : num_(1.0 - alpha), den_(alpha) {
    detail::require_open_unit(alpha, "DlSampler");
  }

  template <class Engine>
  double operator()(Engine& engine) {
    for (;;) {
      const double a = num_(engine);
      const double b = den_(engine);
      if (a > 0.0 && b > 0.0) return a / b;
    }
  }

 private:
  std::gamma_distribution<double> num_;
  std::gamma_distribution<double> den_;
};

// ---------------------------------------------------------------------------
// Size thresholds for survival / extinction.

struct ThresholdReport {
  double alpha = 0.0;
  double v_minus = 0.0;
  double v_plus = 0.0;
  double gap = 0.0;
  std::vector<long long> indeterminate_sizes;
};

inline ThresholdReport thresholds(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    std::ostringstream os;
    os << "thresholds: alpha must lie in (1/2, 1), got " << alpha;
    throw DomainError(os.str());
  }
  ThresholdReport r;
  r.alpha = alpha;
  r.v_plus = 1.0 / (1.0 - alpha);
  r.v_minus = 2.0 + (2.0 * alpha - 1.0) / ((1.0 - alpha) * (2.0 - alpha));
  r.gap = r.v_plus - r.v_minus;
  for (auto k = static_cast<long long>(std::ceil(r.v_minus)); static_cast<double>(k) <= r.v_plus; ++k) {
    r.indeterminate_sizes.push_back(k);
  }
  return r;
}

// Largest M for which the extinction criterion M < 1 + (2a-1)/((1-a)(2-a)) holds strictly.
inline double appendix_threshold(double alpha) {
  return 1.0 + (2.0 * alpha - 1.0) / ((1.0 - alpha) * (2.0 - alpha));
}

// ---------------------------------------------------------------------------
// Maximum of M independent limit-law variables.

namespace detail {

inline void require_count(int M) {
  if (M < 1) throw InputError("M must be an integer >= 1");
}

// M K^M times the integral of w(x) g(x)^{M-1} x^-alpha/(1+x) over (0, inf),
// split at 1. The caller factors the weight near each end as
//   w(x) x^-alpha = lo(log x) x^{r-1}       on (0,1],
//   w(1/u) u^{alpha-1} = hi(log u) u^{s-1}   on (0,1] with x = 1/u,
// and the substitutions x = v^{1/r}, u = v^{1/s} absorb the power singularity.
template <class Lo, class Hi>
double max_law_integral(double alpha, int M, double r, Lo&& lo, double s, Hi&& hi,
                        double rel_tol, std::string_view what) {
  const double K = dl_normalizer(alpha);
  auto lower = [&](double v) {
    const double L = std::log(v) / r;
    const double x = std::exp(L);
    const double gm = M == 1 ? 1.0 : std::pow(appendix_g(alpha, x), M - 1);
    return lo(L) * gm / (1.0 + x);
  };
  auto upper = [&](double v) {
    const double L = std::log(v) / s;
    const double u = std::exp(L);
    const double x = u > 0.0 ? 1.0 / u : std::numeric_limits<double>::infinity();
    const double gm = M == 1 ? 1.0 : std::pow(appendix_g(alpha, x), M - 1);
    return hi(L) * gm / (1.0 + u);
  };
  const double a = integrate_singular(lower, 0.0, 1.0, rel_tol, what) / r;
  const double b = integrate_singular(upper, 0.0, 1.0, rel_tol, what) / s;
  return M * std::pow(K, M) * (a + b);
}

}  // namespace detail

// E[log Y] for Y the maximum of M independent normalised limit-law variables.
inline double expected_log_max(double alpha, int M) {
  detail::require_open_unit(alpha, "expected_log_max");
  detail::require_count(M);
  auto lo = [](double L) { return L; };
  auto hi = [](double L) { return -L; };
  return detail::max_law_integral(alpha, M, 1.0 - alpha, lo, alpha, hi, 1e-11, "expected_log_max");
}

// Monte Carlo estimate of E[log Y] from exact draws.
inline MeanEstimate expected_log_max_mc(double alpha, int M, std::size_t samples,
                                        std::uint64_t seed, unsigned workers = 1) {
  detail::require_open_unit(alpha, "expected_log_max_mc");
  detail::require_count(M);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  const auto parts = parallel_map(blocks, workers, [&](std::size_t b) {
    std::mt19937_64 engine(derive_seed(seed, StreamTag::auxiliary, b));
    DlSampler draw(alpha);
    const std::size_t count = std::min(kBlock, samples - b * kBlock);
    std::vector<double> logs(count);
    for (auto& v : logs) {
      double y = 0.0;
      for (int i = 0; i < M; ++i) y = std::max(y, draw(engine));
      v = std::log(y);
    }
    return logs;
  });
  std::vector<double> all;
  all.reserve(samples);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return mean_and_stderr(all);
}

// Phi(t) = E[Y^t], finite for t in (-(1-alpha), alpha).
inline double phi(double alpha, int M, double t) {
  detail::require_open_unit(alpha, "phi");
  detail::require_count(M);
  if (!(t > -(1.0 - alpha) && t < alpha)) {
    std::ostringstream os;
    os << "phi: moment order must lie in (" << -(1.0 - alpha) << ", " << alpha << "), got " << t;
    throw DomainError(os.str());
  }
  if (t == 0.0) return 1.0;
  auto one = [](double) { return 1.0; };
  return detail::max_law_integral(alpha, M, 1.0 - alpha + t, one, alpha - t, one, 1e-10, "phi");
}

struct ContractionExponent {
  double theta = 0.0;
  double phi_theta = 0.0;
};

// Searches (0, alpha) for theta with Phi(theta) < 1: 256-point grid, then one
// 32-point refinement around the grid minimiser.
inline ContractionExponent find_theta(double alpha, int M) {
  detail::require_open_unit(alpha, "find_theta");
  detail::require_count(M);
  auto safe_phi = [&](double t) {
    try {
      return phi(alpha, M, t);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  constexpr int kGrid = 256;
  const double step = alpha / (kGrid + 1);
  ContractionExponent best{step, safe_phi(step)};
  int best_i = 1;
  for (int i = 2; i <= kGrid; ++i) {
    const double v = safe_phi(i * step);
    if (v < best.phi_theta) {
      best = {i * step, v};
      best_i = i;
    }
  }
  const double lo = (best_i - 1) * step;
  const double hi = (best_i + 1) * step;
  for (int i = 1; i < 32; ++i) {
    const double t = lo + (hi - lo) * i / 32.0;
    if (t <= 0.0 || t >= alpha) continue;
    const double v = safe_phi(t);
    if (v < best.phi_theta) best = {t, v};
  }
  if (!(best.phi_theta < 1.0)) {
    std::ostringstream os;
    os << "no contraction exponent found: min Phi on (0, " << alpha << ") is " << best.phi_theta
       << " at theta=" << best.theta << " (M=" << M << ")";
    throw InfeasibleError(os.str());
  }
  return best;
}

// G(x) = g(x) - x^{b(b+1)} g(1/x), b = 1 - alpha.
inline double appendix_G(double alpha, double x) {
  const double b = 1.0 - alpha;
  return appendix_g(alpha, x) - std::pow(x, b * (b + 1.0)) * appendix_g(alpha, 1.0 / x);
}

// Closed-form derivative of G.
inline double appendix_G_derivative(double alpha, double x) {
  const double b = 1.0 - alpha;
  const double num = 1.0 + std::pow(x, alpha + b * b) -
                     b * (b + 1.0) * appendix_g(alpha, 1.0 / x) * std::pow(x, b * b) * (1.0 + x);
  return num / (std::pow(x, alpha) * (1.0 + x));
}

struct GNegativityReport {
  double alpha = 0.0;
  double g_at_one = 0.0;
  double max_value = -std::numeric_limits<double>::infinity();
  double argmax = 0.0;
  double max_derivative = -std::numeric_limits<double>::infinity();  // central differences
  bool all_negative = true;
  bool derivative_negative = true;
};

inline GNegativityReport appendix_G_negativity(double alpha, std::span<const double> xs) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw DomainError("appendix_G_negativity: alpha must lie in (1/2, 1)");
  GNegativityReport r;
  r.alpha = alpha;
  r.g_at_one = appendix_G(alpha, 1.0);
  for (double x : xs) {
    if (!(x > 1.0)) throw InputError("appendix_G_negativity: grid points must exceed 1");
    const double v = appendix_G(alpha, x);
    if (v > r.max_value) {
      r.max_value = v;
      r.argmax = x;
    }
    r.all_negative = r.all_negative && v < 0.0;
    const double h = 1e-5 * x;
    const double d = (appendix_G(alpha, x + h) - appendix_G(alpha, x - h)) / (2.0 * h);
    r.max_derivative = std::max(r.max_derivative, d);
    r.derivative_negative = r.derivative_negative && d < 0.0;
  }
  return r;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    xs[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Verification statistics.

// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw InputError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic 1% critical value of the KS distance.
inline double ks_critical_99(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_ci(std::uint64_t successes, std::uint64_t trials, double level = 0.95) {
  if (trials == 0) throw InputError("wilson_ci: trials must be > 0");
  if (successes > trials) throw InputError("wilson_ci: successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw InputError("wilson_ci: level must lie in (0,1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(),
                                         1.0 - (1.0 - level) / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// P(sum of k independent Exp(rate) <= x).
inline double erlang_cdf(std::size_t k, double rate, double x) {
  if (x <= 0.0) return 0.0;
  if (k == 0) return 1.0;
  const double lx = rate * x;
  double term = std::exp(-lx);
  double sum = term;
  for (std::size_t i = 1; i < k; ++i) {
    term *= lx / static_cast<double>(i);
    sum += term;
  }
  return std::max(0.0, 1.0 - sum);
}

}  // namespace rcp
