#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "rcp/analysis.hpp"
#include "rcp/error.hpp"
#include "rcp/parallel.hpp"

namespace rcp {

struct DominationParams {
  double alpha = 0.75;
  int M = 2;
  double theta = 0.0;   // 0 = take find_theta(alpha, M)
  double eta = 0.001;
  int log_n = 9;        // N = round(e^log_n); the tail grid uses log_n exactly
  double rho = 1e-11;
  std::optional<double> mu;  // unset = midpoint of the feasible range
  std::uint64_t max_linear_atoms = 200'000'000;
  double tail_cutoff = 1e-15;

  void validate() const {
    detail::require_open_unit(alpha, "DominationParams");
    if (M < 1) throw InputError("domination: M must be >= 1");
    if (theta < 0.0 || theta >= alpha) throw InputError("domination: theta must lie in (0, alpha)");
    if (!(eta > 0.0 && eta < 1.0)) throw InputError("domination: eta must lie in (0,1)");
    if (log_n < 1) throw InputError("domination: log N must be a positive integer");
    if (!(rho > 0.0)) throw InputError("domination: rho must be > 0");
    if (mu && !(*mu > 0.0 && *mu < 1.0)) throw InputError("domination: mu must lie in (0,1)");
    if (!(tail_cutoff > 0.0)) throw InputError("domination: tail cutoff must be > 0");
  }
};

// Discrete law on the grid a_j = j/N (j <= N^2), a_j = N e^{j - N^2} (j > N^2),
// with unnormalised masses P(Y in I_j) + rho on the linear part and
// M a^{log N + j - N^2 - 2} beyond it. Linear atoms are computed on demand;
// only their sums are stored.
class DominationLaw {
 public:
  static DominationLaw build(DominationParams p, unsigned workers = 1) {
    p.validate();
    DominationLaw law;
    law.params_ = p;
    if (p.theta == 0.0) {
      const auto ce = find_theta(p.alpha, p.M);
      law.params_.theta = ce.theta;
      law.phi_theta_ = ce.phi_theta;
    } else {
      law.phi_theta_ = phi(p.alpha, p.M, p.theta);
    }
    const double theta = law.params_.theta;
    law.a_ = (1.0 + p.eta) / std::exp(p.alpha);
    if (!(law.a_ * std::exp(theta) < 1.0)) {
      std::ostringstream os;
      os << "domination: a e^theta = " << law.a_ * std::exp(theta) << " >= 1; decrease eta";
      throw InputError(os.str());
    }
    law.N_ = static_cast<std::uint64_t>(std::llround(std::exp(static_cast<double>(p.log_n))));
    law.N2_ = law.N_ * law.N_;
    if (law.N2_ > p.max_linear_atoms) {
      std::ostringstream os;
      os << "domination: N^2 = " << law.N2_ << " linear atoms exceed the budget of " << p.max_linear_atoms;
      throw ResourceError(os.str());
    }
    law.sum_linear(workers);
    law.build_tail();

    law.C_ = law.linear_mass_ + law.rho_mass_ + law.tail_mass_;
    law.numerator_ = law.truncated_moment_ + law.rho_moment_ + law.tail_moment_;
    const double floor = std::max(law.numerator_, law.phi_theta_);
    law.mu_ = p.mu ? *p.mu : 0.5 * (floor + 1.0);
    law.cond2_holds_ = law.phi_theta_ < law.mu_ && law.numerator_ < law.mu_ && law.mu_ < 1.0;
    if (!law.cond2_holds_) {
      std::ostringstream os;
      os << "domination condition fails for log N=" << p.log_n << ", rho=" << p.rho
         << ": theta-moment sum " << law.numerator_ << ", Phi(theta) " << law.phi_theta_
         << ", mu " << law.mu_ << "; increase log N or decrease rho";
      throw InfeasibleError(os.str());
    }
    return law;
  }

  const DominationParams& params() const { return params_; }
  double theta() const { return params_.theta; }
  double phi_theta() const { return phi_theta_; }
  double a() const { return a_; }
  std::uint64_t N() const { return N_; }
  std::uint64_t linear_atoms() const { return N2_; }
  std::uint64_t atom_count() const { return N2_ + tail_.size(); }
  double C() const { return C_; }
  double mu_bound() const { return mu_; }
  bool cond2_holds() const { return cond2_holds_; }
  // E[Ybar^theta], rho * sum a_j^theta, and the tail part of the theta-moment sum.
  double truncated_moment() const { return truncated_moment_; }
  double rho_moment() const { return rho_moment_; }
  double tail_moment() const { return tail_moment_; }
  // E[Ytilde^theta] = (sum of the three parts) / C.
  double theta_moment() const { return numerator_ / C_; }
  double total_probability() const { return (linear_mass_ + rho_mass_ + tail_mass_) / C_; }

  double atom_value(std::uint64_t j) const {
    if (j == 0 || j > atom_count()) throw InputError("domination: atom index out of range");
    if (j <= N2_) return static_cast<double>(j) / static_cast<double>(N_);
    return std::exp(static_cast<double>(params_.log_n) + static_cast<double>(j - N2_));
  }

  // p_{N,rho,j}
  double raw_mass(std::uint64_t j) const {
    if (j == 0 || j > atom_count()) throw InputError("domination: atom index out of range");
    if (j <= N2_) return y_mass(j) + params_.rho;
    return tail_[j - N2_ - 1];
  }

  double probability(std::uint64_t j) const { return raw_mass(j) / C_; }

  // j with x in I_j = (a_{j-1}, a_j]; 0 for x <= 0. May exceed atom_count()
  // when x lies beyond the truncated tail.
  std::uint64_t index_of(double x) const {
    if (!(x > 0.0)) return 0;
    const double n = static_cast<double>(N_);
    if (x <= static_cast<double>(N2_) / n) {
      auto j = static_cast<std::uint64_t>(std::ceil(x * n));
      // guard the rounding of x * N against the exact grid
      while (j > 1 && static_cast<double>(j - 1) / n >= x) --j;
      while (static_cast<double>(j) / n < x) ++j;
      return std::max<std::uint64_t>(j, 1);
    }
    const double steps = std::ceil(std::log(x) - static_cast<double>(params_.log_n));
    return N2_ + static_cast<std::uint64_t>(std::max(1.0, steps));
  }

  // P(Y in I_j) for a linear atom.
  double y_mass(std::uint64_t j) const {
    const double n = static_cast<double>(N_);
    return cell_mass(static_cast<double>(j - 1) / n, static_cast<double>(j) / n);
  }

 private:
  struct Cdf {
    double F;  // P(Y_1 <= x)
    double g;  // g(x) for x <= 2, the tail integral beyond x otherwise
  };

  Cdf single(double x) const {
    const double alpha = params_.alpha;
    const double D = dl_normalizer(alpha);
    if (x <= 0.0) return {0.0, 0.0};
    if (x <= 2.0) {
      const double g = appendix_g(alpha, x);
      return {D * g, g};
    }
    const double h = appendix_g_complement(alpha, x);
    return {1.0 - D * h, h};
  }

  // P(Y in (lo, hi]) = F(hi)^M - F(lo)^M, factored so that the single-law
  // increment is taken as one difference.
  double cell_mass(double lo, double hi) const {
    const Cdf l = single(lo);
    const Cdf h = single(hi);
    return cell_mass(lo, hi, l, h);
  }

  double cell_mass(double lo, double hi, const Cdf& l, const Cdf& h) const {
    const double alpha = params_.alpha;
    const double D = dl_normalizer(alpha);
    double inc;
    if (hi <= 2.0) {
      inc = D * (h.g - l.g);
    } else if (lo > 2.0) {
      inc = D * (l.g - h.g);
    } else {
      inc = h.F - l.F;
    }
    double poly = 0.0;
    for (int i = 0; i < params_.M; ++i) poly += std::pow(h.F, i) * std::pow(l.F, params_.M - 1 - i);
    return std::max(0.0, inc * poly);
  }

  void sum_linear(unsigned workers) {
    constexpr std::uint64_t kChunk = 1u << 16;
    const std::uint64_t chunks = (N2_ + kChunk - 1) / kChunk;
    const double n = static_cast<double>(N_);
    const double theta = params_.theta;
    struct Part {
      double mass = 0.0, moment = 0.0, grid_moment = 0.0;
    };
    const auto parts = parallel_map(chunks, workers, [&](std::size_t c) {
      const std::uint64_t first = c * kChunk + 1;
      const std::uint64_t last = std::min(N2_, first + kChunk - 1);
      Part p;
      double lo = static_cast<double>(first - 1) / n;
      Cdf prev = single(lo);
      for (std::uint64_t j = first; j <= last; ++j) {
        const double hi = static_cast<double>(j) / n;
        const Cdf cur = single(hi);
        const double m = cell_mass(lo, hi, prev, cur);
        const double w = std::pow(hi, theta);
        p.mass += m;
        p.moment += w * m;
        p.grid_moment += w;
        lo = hi;
        prev = cur;
      }
      return p;
    });
    for (const auto& p : parts) {
      linear_mass_ += p.mass;
      truncated_moment_ += p.moment;
      rho_moment_ += p.grid_moment;
    }
    rho_moment_ *= params_.rho;
    rho_mass_ = params_.rho * static_cast<double>(N2_);
  }

  void build_tail() {
    const double k = static_cast<double>(params_.log_n);
    const double theta = params_.theta;
    for (std::uint64_t i = 1;; ++i) {
      const double mass = params_.M * std::pow(a_, k + static_cast<double>(i) - 2.0);
      if (mass < params_.tail_cutoff) break;
      tail_.push_back(mass);
      tail_mass_ += mass;
      tail_moment_ += std::exp(theta * (k + static_cast<double>(i))) * mass;
    }
  }

  DominationParams params_;
  double phi_theta_ = 0.0;
  double a_ = 0.0;
  std::uint64_t N_ = 0;
  std::uint64_t N2_ = 0;
  std::vector<double> tail_;
  double linear_mass_ = 0.0;
  double rho_mass_ = 0.0;
  double tail_mass_ = 0.0;
  double truncated_moment_ = 0.0;
  double rho_moment_ = 0.0;
  double tail_moment_ = 0.0;
  double numerator_ = 0.0;
  double C_ = 0.0;
  double mu_ = 0.0;
  bool cond2_holds_ = false;
};

}  // namespace rcp
