#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcp/analysis.hpp"
#include "rcp/domination.hpp"
#include "rcp/engine.hpp"
#include "rcp/error.hpp"
#include "rcp/graph.hpp"
#include "rcp/heavytail.hpp"
#include "rcp/parallel.hpp"
#include "rcp/renewal.hpp"
#include "rcp/rng.hpp"

namespace rcp {

// ---------------------------------------------------------------------------
// Survival sweeps

struct SweepSpec {
  std::vector<double> alphas{0.75};
  std::vector<Graph> graphs{Graph::complete(2)};
  Family family = Family::plain;
  double kappa = 0.0;
  double lambda = 2.0;
  std::vector<double> horizons{1e2, 1e3, 1e4};
  std::size_t runs = 400;
  std::uint64_t master_seed = 1;
  std::uint64_t max_events_per_run = 0;  // 0 = unlimited

  void validate() const {
    if (alphas.empty() || graphs.empty() || horizons.empty()) {
      throw InputError("sweep: alphas, graphs and horizons must be nonempty");
    }
    if (runs == 0) throw InputError("sweep: runs must be > 0");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      if (!(horizons[i] > 0.0) || !std::isfinite(horizons[i])) throw InputError("sweep: horizons must be finite and > 0");
      if (i > 0 && !(horizons[i] > horizons[i - 1])) throw InputError("sweep: horizons must be strictly ascending");
    }
    for (double a : alphas) HeavyTailSpec{a, family, kappa}.validate();
    if (!(lambda > 0.0)) throw InputError("sweep: lambda must be > 0");
  }
};

struct SweepRow {
  double alpha;
  std::string graph;
  std::size_t n_vertices;
  double lambda;
  double horizon;
  std::size_t runs;
  std::size_t survivors;
  double p_hat;
  Interval ci;
  bool complete;  // false if some runs exhausted the event budget and were dropped
};

inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t rep) {
  return derive_seed(derive_seed(master, StreamTag::cell, cell), StreamTag::replication, rep);
}

// One run per replication serves every horizon through checkpoints.
inline std::vector<SweepRow> survival_sweep(const SweepSpec& spec, unsigned workers = 1) {
  spec.validate();
  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double alpha : spec.alphas) {
    for (const Graph& g : spec.graphs) {
      SimConfig base;
      base.graph = g;
      base.dist = HeavyTailSpec{alpha, spec.family, spec.kappa};
      base.lambda = spec.lambda;
      base.horizon = spec.horizons.back();
      base.checkpoints = spec.horizons;
      base.max_events = spec.max_events_per_run;
      base.validate();
      const auto outcomes = parallel_map(spec.runs, workers, [&](std::size_t r) {
        SimConfig cfg = base;
        cfg.seed = replication_seed(spec.master_seed, cell, r);
        try {
          return std::optional<std::vector<bool>>(simulate(cfg).survival_at_checkpoints);
        } catch (const ResourceError&) {
          return std::optional<std::vector<bool>>();
        }
      });
      std::size_t finished = 0;
      std::vector<std::size_t> survivors(spec.horizons.size(), 0);
      for (const auto& o : outcomes) {
        if (!o) continue;
        ++finished;
        for (std::size_t h = 0; h < survivors.size(); ++h) survivors[h] += (*o)[h] ? 1 : 0;
      }
      for (std::size_t h = 0; h < spec.horizons.size(); ++h) {
        SweepRow row{alpha, g.name(), g.vertex_count(), spec.lambda, spec.horizons[h], finished,
                     survivors[h], 0.0, {0.0, 1.0}, finished == spec.runs};
        if (finished > 0) {
          row.p_hat = static_cast<double>(survivors[h]) / static_cast<double>(finished);
          row.ci = wilson_ci(survivors[h], finished, 0.95);
        }
        rows.push_back(row);
      }
      ++cell;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Renewal theorem checks

struct EtRow {
  double alpha;
  double t;
  double h;
  std::size_t runs;
  double estimate;
  double std_error;
  double theory;
  double rel_err;
  bool pass;
};

inline constexpr double kEtTolerance = 0.10;

inline EtRow verify_et_at(const HeavyTailSpec& spec, double t, double h, std::size_t runs,
                          std::uint64_t seed, unsigned workers = 1) {
  const auto est = estimate_renewal_increment(spec, t, h, runs, seed, workers);
  const double theory = c_alpha(spec.alpha) * h / truncated_mean(spec, t);
  const double rel = std::abs(est.mean / theory - 1.0);
  return {spec.alpha, t, h, runs, est.mean, est.std_error, theory, rel, rel <= kEtTolerance};
}

inline std::vector<EtRow> verify_et(const HeavyTailSpec& spec, const std::vector<double>& ts, double h,
                                    std::size_t runs, std::uint64_t seed, unsigned workers = 1) {
  std::vector<EtRow> rows;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    rows.push_back(verify_et_at(spec, ts[i], h, runs, derive_seed(seed, StreamTag::cell, i), workers));
  }
  return rows;
}

// E(t) for `runs` independent clocks, clock r seeded by (seed, replication, r).
inline std::vector<double> sample_excess(const HeavyTailSpec& spec, double t, std::size_t runs,
                                         std::uint64_t seed, unsigned workers = 1) {
  spec.validate();
  detail::require_time(t, "sample_excess: t");
  if (runs == 0) throw InputError("sample_excess: runs must be > 0");
  return parallel_map(runs, workers, [&](std::size_t r) {
    RenewalClock<HeavyTailSpec> clock(spec, derive_seed(seed, StreamTag::replication, r));
    return clock.excess(t);
  });
}

struct DlRow {
  double alpha;
  double t;
  std::size_t n;
  double ks;
  double threshold;
  bool pass;
};

inline constexpr double kDlThreshold = 0.02;

inline DlRow verify_dl(const HeavyTailSpec& spec, double t, std::size_t n, std::uint64_t seed,
                       unsigned workers = 1, DlConstant constant = DlConstant::normalized) {
  auto samples = sample_excess(spec, t, n, seed, workers);
  for (double& v : samples) v /= t;
  const double alpha = spec.alpha;
  const double ks = ks_statistic(std::move(samples), [&](double x) { return dl_cdf(alpha, x, constant); });
  return {alpha, t, n, ks, kDlThreshold, ks < kDlThreshold};
}

enum class TailBound { corollary32, prop41 };

inline std::string_view to_string(TailBound b) {
  return b == TailBound::corollary32 ? "corollary32" : "prop41";
}

struct TailBoundReport {
  TailBound which;
  double alpha;
  double t;
  double param;      // m for corollary32, n for prop41
  double tolerance;  // epsilon or eta
  std::size_t runs;
  std::size_t hits;
  double empirical;
  Interval ci;
  double bound;
  bool pass;
};

// corollary32: P(E(t) <= m) against m / t^{1-alpha-eps}.
// prop41:      P(E(t)/t > e^n) against ((1+eta)/e^alpha)^n.
// Passes when the upper end of the 95% Wilson interval is at most the bound.
inline TailBoundReport tail_bound_from_samples(const std::vector<double>& excess, double alpha,
                                               double t, TailBound which, double param, double tol) {
  if (excess.empty()) throw InputError("tail_bound_check: no samples");
  TailBoundReport r{which, alpha, t, param, tol, excess.size(), 0, 0.0, {}, 0.0, false};
  if (which == TailBound::corollary32) {
    if (param < 0.0) throw InputError("corollary32: m must be >= 0");
    r.bound = param / std::pow(t, 1.0 - alpha - tol);
    for (double e : excess) r.hits += e <= param ? 1 : 0;
  } else {
    if (!(tol > 0.0 && tol < 1.0)) throw InputError("prop41: eta must lie in (0,1)");
    r.bound = std::pow((1.0 + tol) / std::exp(alpha), param);
    const double level = std::exp(param);
    for (double e : excess) r.hits += e / t > level ? 1 : 0;
  }
  r.empirical = static_cast<double>(r.hits) / static_cast<double>(r.runs);
  r.ci = wilson_ci(r.hits, r.runs, 0.95);
  // a zero bound is met exactly by zero hits
  r.pass = r.bound == 0.0 ? r.hits == 0 : r.ci.hi <= r.bound;
  return r;
}

inline TailBoundReport tail_bound_check(const HeavyTailSpec& spec, double t, double param, double tol,
                                        std::size_t runs, TailBound which, std::uint64_t seed,
                                        unsigned workers = 1) {
  return tail_bound_from_samples(sample_excess(spec, t, runs, seed, workers), spec.alpha, t, which,
                                 param, tol);
}

// ---------------------------------------------------------------------------
// Survival machinery: schedule and events A_n, B_n

struct ScheduleEntry {
  std::uint64_t n;
  double b;
  double c;                  // ceil(b^{|V|(alpha+eps)+1}); may exceed 2^53
  std::optional<double> t;   // defined only for n >= n0
  double probe_time;         // t_scale * n, used by the probes below
};

struct SurvivalSchedule {
  std::size_t n_vertices = 0;
  double alpha = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  std::size_t walk_length = 0;
  bool feasible = false;
  std::string reason;
  double log_n0 = std::numeric_limits<double>::quiet_NaN();
  std::vector<ScheduleEntry> entries;
};

struct ScheduleParams {
  std::optional<double> epsilon;  // default: half the largest epsilon with beta > 1
  std::optional<double> gamma;    // default: max(1, l/lambda) + 1
  std::uint64_t n_min = 2;
  std::uint64_t n_max = 60;
  double t_scale = 1.0;
};

namespace detail {

inline double c_exponent(std::size_t nv, double alpha, double eps) {
  return static_cast<double>(nv) * (alpha + eps) + 1.0;
}

// Smallest L = log n (n >= 3) with (p+1) log(gamma L) + log 2 < eps L, found
// in log space since n0 is typically far beyond double range.
inline double log_first_index(double gamma, double p, double eps) {
  auto ok = [&](double L) { return (p + 1.0) * std::log(gamma * L) + std::log(2.0) < eps * L; };
  double hi = std::log(3.0);
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double lo = hi / 2.0;
  if (ok(lo)) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

inline SurvivalSchedule build_schedule(const Graph& g, double alpha, double lambda, ScheduleParams p = {}) {
  detail::require_open_unit(alpha, "build_schedule");
  if (!(lambda > 0.0)) throw InputError("build_schedule: lambda must be > 0");
  if (p.n_min < 2 || p.n_max < p.n_min) throw InputError("build_schedule: need 2 <= n_min <= n_max");
  if (!(p.t_scale > 0.0)) throw InputError("build_schedule: t_scale must be > 0");
  SurvivalSchedule s;
  s.n_vertices = g.vertex_count();
  s.alpha = alpha;
  s.lambda = lambda;
  s.walk_length = spanning_walk(g).length();
  const double nv = static_cast<double>(s.n_vertices);
  const double floor_gamma = std::max(1.0, static_cast<double>(s.walk_length) / lambda);
  s.gamma = p.gamma.value_or(floor_gamma + 1.0);
  if (!(s.gamma > floor_gamma)) {
    std::ostringstream os;
    os << "build_schedule: gamma must exceed max(1, l/lambda) = " << floor_gamma;
    throw InputError(os.str());
  }
  if (!(nv > 1.0 / (1.0 - alpha))) {
    s.feasible = false;
    std::ostringstream os;
    os << "|V| = " << s.n_vertices << " <= 1/(1-alpha) = " << 1.0 / (1.0 - alpha)
       << ": no epsilon gives beta = |V|(1-alpha-3 eps) > 1";
    s.reason = os.str();
    s.epsilon = p.epsilon.value_or(0.0);
    s.beta = nv * (1.0 - alpha - 3.0 * s.epsilon);
    return s;
  }
  const double eps_max = (1.0 - alpha - 1.0 / nv) / 3.0;
  s.epsilon = p.epsilon.value_or(eps_max / 2.0);
  if (!(s.epsilon > 0.0)) throw InputError("build_schedule: epsilon must be > 0");
  s.beta = nv * (1.0 - alpha - 3.0 * s.epsilon);
  if (!(s.beta > 1.0)) {
    s.feasible = false;
    std::ostringstream os;
    os << "epsilon = " << s.epsilon << " gives beta = " << s.beta << " <= 1; need epsilon < " << eps_max;
    s.reason = os.str();
    return s;
  }
  s.feasible = true;
  const double pexp = detail::c_exponent(s.n_vertices, alpha, s.epsilon);
  s.log_n0 = detail::log_first_index(s.gamma, pexp, s.epsilon);

  double running = 0.0;  // t_hat_1 proxy = 0
  for (std::uint64_t n = p.n_min; n <= p.n_max; ++n) {
    const double ln = std::log(static_cast<double>(n));
    ScheduleEntry e{n, s.gamma * ln, std::ceil(std::pow(s.gamma * ln, pexp)), std::nullopt,
                    p.t_scale * static_cast<double>(n)};
    if (ln >= s.log_n0) {
      running += std::pow(static_cast<double>(n), s.epsilon) - e.c * e.b;
      e.t = running;
    }
    s.entries.push_back(e);
  }
  return s;
}

struct EventProbeRow {
  std::uint64_t n;
  double time;             // probe time t_n
  double a_threshold;      // (n+1)^eps
  double a_joint;          // frequency of A_n^c
  double a_marginal;       // per-vertex frequency of E_x(t_n) <= (n+1)^eps
  double a_product;        // a_marginal^|V|
  double a_bound;          // n^-beta
  double b_freq;           // frequency of B_n^c
  double b_bound;          // n^-gamma
  std::uint64_t b_capped;  // runs whose B_n scan stopped at the cap
};

// Empirical frequencies of A_n^c and B_n^c at the probe times of the
// schedule, from fresh cure clocks (runs independent replications per n).
inline std::vector<EventProbeRow> probe_survival_events(const SurvivalSchedule& s, const HeavyTailSpec& spec,
                                                        std::size_t runs, std::uint64_t seed,
                                                        unsigned workers = 1,
                                                        std::uint64_t max_b_steps = 100'000) {
  spec.validate();
  if (std::abs(spec.alpha - s.alpha) > 0.0) throw InputError("probe_survival_events: spec alpha differs from schedule alpha");
  if (runs == 0) throw InputError("probe_survival_events: runs must be > 0");
  std::vector<EventProbeRow> rows;
  const std::size_t nv = s.n_vertices;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    const double t = e.probe_time;
    const double thr = std::pow(static_cast<double>(e.n + 1), s.epsilon);
    struct Outcome {
      bool a_complement = true;
      std::size_t below = 0;
      bool b_complement = true;
      bool capped = false;
    };
    const std::uint64_t cap = std::min<double>(e.c, static_cast<double>(max_b_steps)) < e.c
                                  ? max_b_steps
                                  : static_cast<std::uint64_t>(e.c);
    const auto out = parallel_map(runs, workers, [&](std::size_t r) {
      const std::uint64_t rs = replication_seed(seed, i, r);
      std::vector<RenewalClock<HeavyTailSpec>> clocks;
      clocks.reserve(nv);
      for (Vertex x = 0; x < nv; ++x) clocks.emplace_back(spec, vertex_stream_seed(rs, x));
      Outcome o;
      for (auto& c : clocks) {
        const bool le = c.excess(t) <= thr;
        o.below += le ? 1 : 0;
        o.a_complement = o.a_complement && le;
      }
      for (std::uint64_t j = 0; j < cap; ++j) {
        const double tj = t + static_cast<double>(j) * e.b;
        bool all_long = true;
        for (auto& c : clocks) {
          if (c.excess(tj) <= e.b) {
            all_long = false;
            break;
          }
        }
        if (all_long) {
          o.b_complement = false;
          break;
        }
      }
      o.capped = o.b_complement && static_cast<double>(cap) < e.c;
      return o;
    });
    EventProbeRow row{e.n, t, thr, 0, 0, 0, std::pow(static_cast<double>(e.n), -s.beta), 0,
                      std::pow(static_cast<double>(e.n), -s.gamma), 0};
    std::size_t a = 0, below = 0, b = 0;
    for (const auto& o : out) {
      a += o.a_complement;
      below += o.below;
      b += o.b_complement;
      row.b_capped += o.capped;
    }
    const double R = static_cast<double>(runs);
    row.a_joint = static_cast<double>(a) / R;
    row.a_marginal = static_cast<double>(below) / (R * static_cast<double>(nv));
    row.a_product = std::pow(row.a_marginal, static_cast<double>(nv));
    row.b_freq = static_cast<double>(b) / R;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Stairway of infection

// Y_0 = t, Y_i = Y_{i-1} + E_{e_i}(Y_{i-1}) along the given edge walk, with one
// fresh rate-lambda clock per edge; returns Y_l - t for each run.
inline std::vector<double> stairway(const std::vector<EdgeId>& walk, std::size_t edge_count, double lambda,
                                    double t, std::size_t runs, std::uint64_t seed, unsigned workers = 1) {
  if (!(lambda > 0.0)) throw InputError("stairway: lambda must be > 0");
  detail::require_time(t, "stairway: t");
  for (EdgeId e : walk) {
    if (e >= edge_count) throw InputError("stairway: walk uses an edge outside the graph");
  }
  return parallel_map(runs, workers, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(seed, StreamTag::replication, r);
    // The marks of a Poisson clock after t form a Poisson clock started at t,
    // so each clock runs on the shifted time y - t instead of from 0.
    std::vector<std::optional<RenewalClock<ExponentialRate>>> clocks(edge_count);
    double y = 0.0;
    for (EdgeId e : walk) {
      if (!clocks[e]) clocks[e].emplace(ExponentialRate{lambda}, edge_stream_seed(rs, e));
      y += clocks[e]->excess(y);
    }
    return y;
  });
}

inline std::vector<double> stairway(const Graph& g, double lambda, double t, std::size_t runs,
                                    std::uint64_t seed, unsigned workers = 1) {
  return stairway(spanning_walk(g).edges, g.edge_count(), lambda, t, runs, seed, workers);
}

// ---------------------------------------------------------------------------
// Extinction chain

struct ExtinctionChainState {
  double t_star = 0.0;
  std::vector<double> S;                  // S_1, S_2, ...
  std::vector<double> X;                  // X_n = S_n - S_{n-1}
  std::vector<std::vector<double>> Xv;    // X_{n,x}
  std::vector<std::vector<double>> W;     // W_{n,x} = X_n - X_{n,x}
  std::vector<std::vector<double>> Z;     // Z_{n,x} (from n = 2; empty at n = 1)
  std::vector<Vertex> argmax;             // x_n
  bool capped = false;                    // stopped because S_n passed the time cap

  std::size_t steps() const noexcept { return S.size(); }
};

struct ChainParams {
  double t_star = 10.0;
  double t_tilde = 40.0;  // t*/delta; only enters Z
  std::size_t n_steps = 20;
  double time_cap = 1e8;  // stop once S_n exceeds this

  void validate() const {
    if (!(t_star > 0.0) || !std::isfinite(t_star)) throw InputError("chain: t_star must be finite and > 0");
    if (!(t_tilde > 2.0 * t_star)) throw InputError("chain: t_tilde must exceed 2 t_star (delta < 1/2)");
    if (n_steps < 1) throw InputError("chain: n_steps must be >= 1");
    if (!(time_cap > 0.0) || !std::isfinite(time_cap)) throw InputError("chain: time_cap must be finite and > 0");
  }
};

// Drives the cure clocks only. Clock must provide excess(t) for nondecreasing t.
//   X_{1,v0} = E_{v0}(0), X_{1,x} = 0 otherwise;
//   X_{n+1,x} = 0 if x = x_n, E_x(S_n) if W_{n,x} >= t*, E_x(S_n + t*) + t* otherwise.
// Ties in the argmax go to the lowest index.
template <class Clock>
ExtinctionChainState extinction_chain(std::vector<Clock>& clocks, Vertex v0, const ChainParams& p) {
  p.validate();
  const std::size_t n = clocks.size();
  if (v0 >= n) throw InputError("chain: v0 out of range");
  ExtinctionChainState st;
  st.t_star = p.t_star;
  auto push = [&](std::vector<double> xv, std::vector<double> z, double S_prev) {
    Vertex arg = 0;
    for (Vertex x = 1; x < n; ++x) {
      if (xv[x] > xv[arg]) arg = x;
    }
    const double Xn = xv[arg];
    std::vector<double> w(n);
    for (Vertex x = 0; x < n; ++x) w[x] = Xn - xv[x];
    st.S.push_back(S_prev + Xn);
    st.X.push_back(Xn);
    st.Xv.push_back(std::move(xv));
    st.W.push_back(std::move(w));
    st.Z.push_back(std::move(z));
    st.argmax.push_back(arg);
  };
  std::vector<double> first(n, 0.0);
  first[v0] = clocks[v0].excess(0.0);
  push(std::move(first), {}, 0.0);
  while (st.steps() < p.n_steps) {
    // A lone vertex has the single interval (0, T_1].
    if (n == 1) break;
    const double S = st.S.back();
    if (!(S <= p.time_cap)) {
      st.capped = true;
      break;
    }
    const Vertex last = st.argmax.back();
    const auto& W = st.W.back();
    std::vector<double> xv(n, 0.0), z(n, 0.0);
    for (Vertex x = 0; x < n; ++x) {
      if (x == last) continue;
      if (W[x] >= p.t_star) {
        xv[x] = clocks[x].excess(S);
        z[x] = xv[x] / W[x];
      } else {
        xv[x] = clocks[x].excess(S + p.t_star) + p.t_star;
        z[x] = (xv[x] - p.t_star) / (W[x] + p.t_star) + p.t_star / p.t_tilde;
      }
    }
    push(std::move(xv), std::move(z), S);
  }
  return st;
}

// Chain on the cure streams that simulate() uses for cfg seed `seed`.
inline ExtinctionChainState extinction_chain(const Graph& g, const HeavyTailSpec& spec, Vertex v0,
                                             const ChainParams& p, std::uint64_t seed) {
  std::vector<RenewalClock<HeavyTailSpec>> clocks;
  clocks.reserve(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x) clocks.emplace_back(spec, vertex_stream_seed(seed, x));
  return extinction_chain(clocks, v0, p);
}

struct AtomCheck {
  std::size_t samples = 0;
  std::size_t atoms_hit = 0;
  std::size_t violations = 0;
  double worst_z = -std::numeric_limits<double>::infinity();
  std::uint64_t worst_atom = 0;
  double worst_empirical = 0.0;
  double worst_bound = 0.0;
  bool pass() const noexcept { return violations == 0; }
};

// Compares empirical atom frequencies with C p_j; an atom violates when its
// frequency exceeds C p_j by more than `sigmas` binomial standard errors.
inline AtomCheck compare_atoms(const std::map<std::uint64_t, std::size_t>& counts, std::size_t samples,
                               const DominationLaw& law, double sigmas = 3.0) {
  AtomCheck r;
  r.samples = samples;
  r.atoms_hit = counts.size();
  if (samples == 0) return r;
  const double n = static_cast<double>(samples);
  for (const auto& [j, k] : counts) {
    const double ph = static_cast<double>(k) / n;
    const double se = std::sqrt(ph * (1.0 - ph) / n);
    const double bound = (j >= 1 && j <= law.atom_count()) ? law.raw_mass(j) : 0.0;
    const double excess = ph - bound;
    if (excess > sigmas * se) ++r.violations;
    const double z = se > 0.0 ? excess / se : (excess > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (z > r.worst_z) {
      r.worst_z = z;
      r.worst_atom = j;
      r.worst_empirical = ph;
      r.worst_bound = bound;
    }
  }
  return r;
}

struct ChainRatioReport {
  std::size_t chains = 0;
  std::size_t capped_chains = 0;
  AtomCheck ratio;  // X_{n+1} / X_n on steps with X_n > t_tilde
  AtomCheck z;      // Z_{n+1} = max_x Z_{n+1,x} on the same steps
};

inline ChainRatioReport chain_ratio_check(const DominationLaw& law, const Graph& g, const HeavyTailSpec& spec,
                                          const ChainParams& p, std::size_t chains, std::uint64_t seed,
                                          unsigned workers = 1) {
  p.validate();
  if (static_cast<int>(g.vertex_count()) - 1 != law.params().M) {
    throw InputError("chain_ratio_check: the law's M must equal |V| - 1");
  }
  struct Part {
    std::vector<std::uint64_t> ratio, z;
    bool capped;
  };
  const auto parts = parallel_map(chains, workers, [&](std::size_t c) {
    const auto st = extinction_chain(g, spec, 0, p, derive_seed(seed, StreamTag::replication, c));
    Part part{{}, {}, st.capped};
    for (std::size_t k = 0; k + 1 < st.steps(); ++k) {
      if (!(st.X[k] > p.t_tilde)) continue;
      part.ratio.push_back(law.index_of(st.X[k + 1] / st.X[k]));
      part.z.push_back(law.index_of(*std::max_element(st.Z[k + 1].begin(), st.Z[k + 1].end())));
    }
    return part;
  });
  ChainRatioReport r;
  r.chains = chains;
  std::map<std::uint64_t, std::size_t> rc, zc;
  std::size_t samples = 0;
  for (const auto& part : parts) {
    r.capped_chains += part.capped;
    samples += part.ratio.size();
    for (auto j : part.ratio) ++rc[j];
    for (auto j : part.z) ++zc[j];
  }
  r.ratio = compare_atoms(rc, samples, law);
  r.z = compare_atoms(zc, samples, law);
  return r;
}

// ---------------------------------------------------------------------------
// Necessary condition: the process can be alive at S_{n+1} only if some
// transmission mark falls in (S_n, S_{n+1}].

struct AuditResult {
  std::size_t intervals_checked = 0;
  std::size_t violations = 0;
};

// transmit_times sorted ascending; S = (S_1, S_2, ...) with S_0 = 0 implied.
// alive(t) is t < extinction time, or t <= horizon when censored.
inline AuditResult audit_intervals(const std::vector<double>& transmit_times,
                                   std::optional<double> extinction_time, double horizon,
                                   const std::vector<double>& S) {
  AuditResult r;
  double prev = 0.0;
  for (double next : S) {
    if (next > horizon) break;
    const bool alive = extinction_time ? next < *extinction_time : true;
    if (alive) {
      ++r.intervals_checked;
      const auto it = std::upper_bound(transmit_times.begin(), transmit_times.end(), prev);
      if (it == transmit_times.end() || *it > next) ++r.violations;
    }
    prev = next;
  }
  return r;
}

inline std::vector<double> transmit_times(const std::vector<TraceRecord>& log) {
  std::vector<double> out;
  for (const auto& r : log) {
    if (r.kind == TraceKind::transmit) out.push_back(r.time);
  }
  return out;
}

struct AuditReport {
  std::size_t runs = 0;
  std::size_t violating_runs = 0;
  std::size_t intervals_checked = 0;
  std::size_t violations = 0;
};

// Traced runs on cfg (seed r from (cfg.seed, replication, r)); each is
// audited against the extinction chain built from its own cure streams.
inline AuditReport necessary_condition_audit(const SimConfig& cfg, double t_star, std::size_t runs,
                                             unsigned workers = 1) {
  cfg.validate();
  ChainParams p;
  p.t_star = t_star;
  p.t_tilde = 4.0 * t_star;
  p.n_steps = std::numeric_limits<std::size_t>::max();
  p.time_cap = cfg.horizon;
  const auto results = parallel_map(runs, workers, [&](std::size_t r) {
    SimConfig c = cfg;
    c.seed = derive_seed(cfg.seed, StreamTag::replication, r);
    const auto tr = simulate_trace(c);
    const auto chain = extinction_chain(c.graph, c.dist, c.v0, p, c.seed);
    return audit_intervals(transmit_times(tr.log), tr.result.extinction_time, c.horizon, chain.S);
  });
  AuditReport rep;
  rep.runs = runs;
  for (const auto& a : results) {
    rep.intervals_checked += a.intervals_checked;
    rep.violations += a.violations;
    rep.violating_runs += a.violations > 0;
  }
  return rep;
}

}  // namespace rcp
