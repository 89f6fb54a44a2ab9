// rcp: command-line front end of the renewal contact process laboratory.
//
// Exit codes: 0 success and every enabled check passed, 1 a check failed,
// 2 usage, configuration or infeasible-parameter error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcp/rcp.hpp"

namespace {

using nlohmann::ordered_json;
using rcp::Cell;
using rcp::Table;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  // common
  std::string config_path;
  unsigned workers = 1;
  std::string out;
  std::string format;  // empty = command default
  std::uint64_t seed = 1;
  // distribution
  double alpha = 0.75;
  std::string family = "plain";
  double kappa = 0.0;
  // simulation
  std::string graph = "complete:2";
  double lambda = 2.0;
  double horizon = 100.0;
  std::size_t v0 = 0;
  std::vector<double> checkpoints;
  double coupling_rate = 0.0;
  std::uint64_t max_events = 0;
  std::string trace_path;
  // campaigns
  std::vector<double> alphas{0.75};
  std::vector<std::string> graphs{"complete:2", "complete:6"};
  std::vector<double> horizons{1e2, 1e3, 1e4};
  std::size_t runs = 400;
  std::vector<double> ts{1e5};
  double t = 1e6;
  double h = 1.0;
  std::size_t n = 20000;
  bool printed_constant = false;
  std::string which = "corollary32";
  double m = 1.0;
  double eps = 0.05;
  double eta = 0.1;
  double dom_eta = 0.001;
  std::size_t probe_runs = 0;
  // theory
  int M = 2;
  std::size_t samples = 1'000'000;
  std::size_t grid = 0;
  double theta = 0.0;
  int logn = 9;
  double rho = 1e-11;
  std::optional<double> mu;
  std::size_t points = 1000;
  double xmax = 1e6;
  // probes
  double t_star = 10.0;
  double t_tilde = 40.0;
  std::size_t steps = 20;
  double time_cap = 1e8;
  std::size_t chains = 0;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  std::uint64_t n_min = 20;
  std::uint64_t n_max = 60;
  double t_scale = 1.0;
  std::size_t b_cap = 100'000;
};

// ---------------------------------------------------------------------------
// config file: keys are the long flag names; the distribution also answers to
// dist.alpha, dist.family, dist.kappa.

std::vector<double> parse_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw rcp::InputError("config key " + key + ": not a number list: " + s);
    }
  }
  return out;
}

std::vector<std::string> parse_strings(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void apply_config(const rcp::Config& c, Options& o) {
  using Setter = std::function<void(const std::string&)>;
  auto num = [&](double& dst) -> Setter {
    return [&](const std::string& k) { dst = *c.get_double(k); };
  };
  auto opt_num = [&](std::optional<double>& dst) -> Setter {
    return [&](const std::string& k) { dst = *c.get_double(k); };
  };
  auto uint = [&](auto& dst) -> Setter {
    return [&](const std::string& k) { dst = static_cast<std::remove_reference_t<decltype(dst)>>(*c.get_uint(k)); };
  };
  auto str = [&](std::string& dst) -> Setter {
    return [&](const std::string& k) { dst = *c.get(k); };
  };
  auto nums = [&](std::vector<double>& dst) -> Setter {
    return [&](const std::string& k) { dst = parse_doubles(k, *c.get(k)); };
  };
  const std::map<std::string, Setter> table{
      {"seed", uint(o.seed)},           {"workers", uint(o.workers)},
      {"format", str(o.format)},        {"out", str(o.out)},
      {"alpha", num(o.alpha)},          {"dist.alpha", num(o.alpha)},
      {"family", str(o.family)},        {"dist.family", str(o.family)},
      {"kappa", num(o.kappa)},          {"dist.kappa", num(o.kappa)},
      {"graph", str(o.graph)},          {"lambda", num(o.lambda)},
      {"horizon", num(o.horizon)},      {"v0", uint(o.v0)},
      {"checkpoints", nums(o.checkpoints)},
      {"coupling-rate", num(o.coupling_rate)},
      {"max-events", uint(o.max_events)},
      {"alphas", nums(o.alphas)},
      {"graphs", [&](const std::string& k) { o.graphs = parse_strings(*c.get(k)); }},
      {"horizons", nums(o.horizons)},   {"runs", uint(o.runs)},
      {"ts", nums(o.ts)},               {"t", num(o.t)},
      {"window", num(o.h)},             {"n", uint(o.n)},
      {"which", str(o.which)},          {"m", num(o.m)},
      {"eps", num(o.eps)},              {"eta", num(o.eta)},
      {"domination.eta", num(o.dom_eta)}, {"probe-runs", uint(o.probe_runs)},
      {"M", [&](const std::string& k) { o.M = static_cast<int>(*c.get_uint(k)); }},
      {"samples", uint(o.samples)},     {"grid", uint(o.grid)},
      {"theta", num(o.theta)},
      {"logn", [&](const std::string& k) { o.logn = static_cast<int>(*c.get_uint(k)); }},
      {"rho", num(o.rho)},              {"mu", opt_num(o.mu)},
      {"points", uint(o.points)},       {"xmax", num(o.xmax)},
      {"t-star", num(o.t_star)},        {"t-tilde", num(o.t_tilde)},
      {"steps", uint(o.steps)},         {"time-cap", num(o.time_cap)},
      {"chains", uint(o.chains)},       {"epsilon", opt_num(o.epsilon)},
      {"gamma", opt_num(o.gamma)},      {"n-min", uint(o.n_min)},
      {"n-max", uint(o.n_max)},         {"t-scale", num(o.t_scale)},
      {"b-cap", uint(o.b_cap)},
  };
  for (const auto& [key, value] : c.values()) {
    const auto it = table.find(key);
    if (it == table.end()) throw rcp::InputError("unknown config key '" + key + "'");
    it->second(key);
  }
}

std::optional<std::string> find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// output

struct Check {
  std::string name;
  bool pass;
};

struct Output {
  std::string command;
  ordered_json config = ordered_json::object();
  Table table;
  std::vector<Check> checks;
  ordered_json extra;  // replaces the rows in JSON when set

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

ordered_json cell_json(const Cell& c) {
  return std::visit([](const auto& v) -> ordered_json {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, rcp::IntList>) {
      return v.values;
    } else {
      return v;
    }
  }, c);
}

void emit(const Output& o, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    Table t = o.table;
    for (const auto& c : o.checks) t.notes.push_back("check " + c.name + ": " + (c.pass ? "pass" : "FAIL"));
    rcp::write_csv(out, t);
    return;
  }
  ordered_json j;
  j["tool"] = "rcp";
  j["version"] = RCP_VERSION;
  j["command"] = o.command;
  j["config"] = o.config;
  if (!o.extra.is_null()) {
    j["result"] = o.extra;
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& r : o.table.rows) {
      ordered_json row;
      for (std::size_t i = 0; i < r.size(); ++i) row[o.table.columns[i]] = cell_json(r[i]);
      rows.push_back(row);
    }
    j["rows"] = rows;
    if (!o.table.notes.empty()) j["notes"] = o.table.notes;
  }
  ordered_json checks = ordered_json::array();
  for (const auto& c : o.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}});
  j["checks"] = checks;
  j["pass"] = o.all_pass();
  out << j.dump(2) << '\n';
}

rcp::HeavyTailSpec dist_of(const Options& o, double alpha) {
  rcp::HeavyTailSpec s{alpha, rcp::parse_family(o.family), o.kappa};
  s.validate();
  return s;
}

void put_dist(ordered_json& cfg, const Options& o) {
  cfg["dist.family"] = o.family;
  cfg["dist.alpha"] = o.alpha;
  cfg["dist.kappa"] = o.kappa;
}

// ---------------------------------------------------------------------------
// commands

Output cmd_simulate(const Options& o) {
  rcp::SimConfig cfg;
  cfg.graph = rcp::Graph::parse(o.graph);
  cfg.dist = dist_of(o, o.alpha);
  cfg.lambda = o.lambda;
  cfg.v0 = o.v0;
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  cfg.checkpoints = o.checkpoints;
  cfg.coupling_rate = o.coupling_rate;
  cfg.max_events = o.max_events;
  cfg.trace = !o.trace_path.empty();
  cfg.validate();
  Output out;
  out.command = "simulate";
  out.config = {{"graph", o.graph}, {"lambda", o.lambda}, {"v0", o.v0}, {"horizon", o.horizon},
                {"seed", o.seed},   {"checkpoints", o.checkpoints},   {"coupling_rate", o.coupling_rate}};
  put_dist(out.config, o);
  rcp::SimResult r;
  if (cfg.trace) {
    const auto tr = rcp::simulate_trace(cfg);
    std::ofstream f(o.trace_path);
    if (!f) throw rcp::InputError("cannot write trace file " + o.trace_path);
    rcp::write_trace_csv(f, tr.log);
    r = tr.result;
  } else {
    r = rcp::simulate(cfg);
  }
    out.extra = {{"extinction_time", r.extinction_time ? ordered_json(*r.extinction_time) : ordered_json(nullptr)},
               {"censored", r.censored},
               {"survival_at_checkpoints", r.survival_at_checkpoints},
               {"peak_infected", r.peak_infected},
               {"events_processed", r.events_processed},
               {"final_state", r.final_state}};
  out.table.columns = {"extinction_time", "censored", "peak_infected", "events_processed"};
  out.table.add({r.extinction_time ? Cell(*r.extinction_time) : Cell(std::string("")), r.censored,
                 static_cast<std::uint64_t>(r.peak_infected), r.events_processed});
  return out;
}

Output cmd_sweep(const Options& o) {
  rcp::SweepSpec s;
  s.alphas = o.alphas;
  s.graphs.clear();
  for (const auto& g : o.graphs) s.graphs.push_back(rcp::Graph::parse(g));
  s.family = rcp::parse_family(o.family);
  s.kappa = o.kappa;
  s.lambda = o.lambda;
  s.horizons = o.horizons;
  s.runs = o.runs;
  s.master_seed = o.seed;
  s.max_events_per_run = o.max_events;
  const auto rows = rcp::survival_sweep(s, o.workers);
  Output out;
  out.command = "sweep";
  out.config = {{"alphas", o.alphas}, {"graphs", o.graphs}, {"dist.family", o.family}, {"dist.kappa", o.kappa},
                {"lambda", o.lambda}, {"horizons", o.horizons}, {"runs", o.runs}, {"seed", o.seed},
                {"max_events", o.max_events}};
  out.table.columns = {"alpha", "graph", "n_vertices", "lambda", "horizon", "runs",
                       "survivors", "p_hat", "ci_lo", "ci_hi"};
  bool complete = true;
  for (const auto& r : rows) {
    out.table.add({r.alpha, r.graph, static_cast<std::uint64_t>(r.n_vertices), r.lambda, r.horizon,
                   static_cast<std::uint64_t>(r.runs), static_cast<std::uint64_t>(r.survivors), r.p_hat,
                   r.ci.lo, r.ci.hi});
    complete = complete && r.complete;
  }
  if (!complete) out.table.notes.push_back("incomplete: some runs exhausted the event budget and were dropped");
  return out;
}

Output cmd_verify_et(const Options& o) {
  Output out;
  out.command = "verify et";
  out.config = {{"alphas", o.alphas}, {"ts", o.ts}, {"h", o.h}, {"runs", o.runs}, {"seed", o.seed}};
  out.config["dist.family"] = o.family;
  out.config["dist.kappa"] = o.kappa;
  out.table.columns = {"alpha", "t", "h", "runs", "estimate", "theory", "rel_err", "pass"};
  std::uint64_t cell = 0;
  for (double a : o.alphas) {
    const auto spec = dist_of(o, a);
    for (double t : o.ts) {
      const auto r = rcp::verify_et_at(spec, t, o.h, o.runs, rcp::derive_seed(o.seed, rcp::StreamTag::cell, cell++),
                                       o.workers);
      out.table.add({r.alpha, r.t, r.h, static_cast<std::uint64_t>(r.runs), r.estimate, r.theory, r.rel_err, r.pass});
      out.checks.push_back({"et alpha=" + rcp::format_double(a) + " t=" + rcp::format_double(t), r.pass});
    }
  }
  return out;
}

Output cmd_verify_dl(const Options& o) {
  const auto constant = o.printed_constant ? rcp::DlConstant::renewal_constant : rcp::DlConstant::normalized;
  const auto r = rcp::verify_dl(dist_of(o, o.alpha), o.t, o.n, o.seed, o.workers, constant);
  Output out;
  out.command = "verify dl";
  out.config = {{"t", o.t}, {"n", o.n}, {"seed", o.seed},
                {"constant", o.printed_constant ? "renewal" : "normalized"}};
  put_dist(out.config, o);
  out.table.columns = {"alpha", "t", "n", "ks", "threshold", "pass"};
  out.table.add({r.alpha, r.t, static_cast<std::uint64_t>(r.n), r.ks, r.threshold, r.pass});
  out.checks.push_back({"dl ks", r.pass});
  if (o.printed_constant) {
    out.table.notes.push_back("total mass of the law with the renewal constant: " +
                              rcp::format_double(rcp::dl_cdf(o.alpha, std::numeric_limits<double>::infinity(),
                                                             rcp::DlConstant::renewal_constant)));
  }
  return out;
}

Output cmd_verify_tail(const Options& o) {
  rcp::TailBound which;
  if (o.which == "corollary32") {
    which = rcp::TailBound::corollary32;
  } else if (o.which == "prop41") {
    which = rcp::TailBound::prop41;
  } else {
    throw rcp::InputError("--which must be corollary32 or prop41");
  }
  const double tol = which == rcp::TailBound::corollary32 ? o.eps : o.eta;
  const auto spec = dist_of(o, o.alpha);
  const auto excess = rcp::sample_excess(spec, o.t, o.runs, o.seed, o.workers);
  Output out;
  out.command = "verify tailbound";
  out.config = {{"which", o.which}, {"t", o.t}, {"m", o.m}, {"eps", o.eps}, {"eta", o.eta},
                {"runs", o.runs},   {"seed", o.seed}};
  put_dist(out.config, o);
  out.table.columns = {"which", "alpha", "t", "param", "tolerance", "runs", "empirical", "ci_lo", "ci_hi", "bound", "pass"};
  std::vector<double> params{o.m};
  if (which == rcp::TailBound::prop41) {
    params.clear();
    for (double k = 1; k <= o.m; ++k) params.push_back(k);
  }
  for (double p : params) {
    const auto r = rcp::tail_bound_from_samples(excess, spec.alpha, o.t, which, p, tol);
    out.table.add({std::string(rcp::to_string(which)), r.alpha, r.t, r.param, r.tolerance,
                   static_cast<std::uint64_t>(r.runs), r.empirical, r.ci.lo, r.ci.hi, r.bound, r.pass});
    out.checks.push_back({o.which + " param=" + rcp::format_double(p), r.pass});
  }
  return out;
}

Output cmd_thresholds(const Options& o) {
  Output out;
  out.command = "theory thresholds";
  out.table.columns = {"alpha", "v_minus", "v_plus", "gap", "indeterminate"};
  std::vector<double> alphas{o.alpha};
  if (o.grid > 0) {
    alphas.clear();
    for (std::size_t i = 1; i <= o.grid; ++i) {
      alphas.push_back(0.5 + 0.5 * static_cast<double>(i) / static_cast<double>(o.grid + 1));
    }
    out.config["grid"] = o.grid;
  } else {
    out.config["alpha"] = o.alpha;
  }
  bool ordered = true;
  for (double a : alphas) {
    const auto r = rcp::thresholds(a);
    out.table.add({r.alpha, r.v_minus, r.v_plus, r.gap, rcp::IntList{r.indeterminate_sizes}});
    ordered = ordered && r.v_minus < r.v_plus && r.gap < 1.0 && r.gap > 0.0;
  }
  out.checks.push_back({"0 < gap < 1", ordered});
  return out;
}

Output cmd_elogy(const Options& o) {
  const double quad = rcp::expected_log_max(o.alpha, o.M);
  const auto mc = rcp::expected_log_max_mc(o.alpha, o.M, o.samples, o.seed, o.workers);
  const bool below = o.M < rcp::appendix_threshold(o.alpha);
  Output out;
  out.command = "theory elogy";
  out.config = {{"alpha", o.alpha}, {"M", o.M}, {"samples", o.samples}, {"seed", o.seed}};
  out.table.columns = {"alpha", "M", "elogy_quadrature", "elogy_mc", "mc_stderr", "below_threshold"};
  out.table.add({o.alpha, static_cast<std::int64_t>(o.M), quad, mc.mean, mc.std_error, below});
  out.checks.push_back({"quadrature within 3 standard errors of Monte Carlo",
                        std::abs(quad - mc.mean) <= 3.0 * mc.std_error});
  if (below) out.checks.push_back({"E[log Y] < 0 below the threshold", quad < 0.0});
  return out;
}

Output cmd_domination(const Options& o) {
  rcp::DominationParams p;
  p.alpha = o.alpha;
  p.M = o.M;
  p.theta = o.theta;
  p.eta = o.dom_eta;
  p.log_n = o.logn;
  p.rho = o.rho;
  p.mu = o.mu;
  const auto law = rcp::DominationLaw::build(p, o.workers);
  Output out;
  out.command = "theory domination";
  out.config = {{"alpha", o.alpha}, {"M", o.M}, {"theta", o.theta}, {"eta", p.eta}, {"logn", o.logn}, {"rho", o.rho}};
  out.config["mu"] = o.mu ? ordered_json(*o.mu) : ordered_json(nullptr);
  out.table.columns = {"alpha", "M", "theta", "phi_theta", "eta", "log_n", "N", "rho", "C",
                       "truncated_moment", "rho_moment", "tail_moment", "theta_moment", "mu", "cond2"};
  out.table.add({o.alpha, static_cast<std::int64_t>(o.M), law.theta(), law.phi_theta(), p.eta,
                 static_cast<std::int64_t>(o.logn), law.N(), o.rho, law.C(), law.truncated_moment(),
                 law.rho_moment(), law.tail_moment(), law.theta_moment(), law.mu_bound(), law.cond2_holds()});
  out.checks.push_back({"theta-moment below mu/C", law.theta_moment() < law.mu_bound() / law.C()});
  return out;
}

Output cmd_appendix_g(const Options& o) {
  const auto xs = rcp::log_grid(1.0 + 1e-3, o.xmax, o.points);
  const auto r = rcp::appendix_G_negativity(o.alpha, xs);
  double max_closed = -std::numeric_limits<double>::infinity();
  for (double x : xs) max_closed = std::max(max_closed, rcp::appendix_G_derivative(o.alpha, x));
  Output out;
  out.command = "theory appendix-g";
  out.config = {{"alpha", o.alpha}, {"points", o.points}, {"xmax", o.xmax}};
  out.table.columns = {"alpha", "G_at_1", "max_G", "argmax", "max_dG_numeric", "max_dG_closed", "all_negative"};
  out.table.add({o.alpha, r.g_at_one, r.max_value, r.argmax, r.max_derivative, max_closed,
                 r.all_negative && r.derivative_negative});
  out.checks.push_back({"G(1) = 0", std::abs(r.g_at_one) < 1e-12});
  out.checks.push_back({"G < 0 on the grid", r.all_negative});
  out.checks.push_back({"G' < 0 on the grid", r.derivative_negative});
  return out;
}

rcp::ChainParams chain_params(const Options& o) {
  rcp::ChainParams p;
  p.t_star = o.t_star;
  p.t_tilde = o.t_tilde;
  p.n_steps = o.steps;
  p.time_cap = o.time_cap;
  return p;
}

Output cmd_chain(const Options& o) {
  const auto g = rcp::Graph::parse(o.graph);
  const auto spec = dist_of(o, o.alpha);
  const auto p = chain_params(o);
  Output out;
  out.command = "probe chain";
  out.config = {{"graph", o.graph}, {"t_star", o.t_star}, {"t_tilde", o.t_tilde}, {"steps", o.steps},
                {"time_cap", o.time_cap}, {"chains", o.chains}, {"seed", o.seed}};
  put_dist(out.config, o);
  if (o.chains == 0) {
    const auto st = rcp::extinction_chain(g, spec, o.v0, p, o.seed);
    out.table.columns = {"step", "S_n", "X_n", "argmax"};
    for (std::size_t k = 0; k < st.steps(); ++k) {
      out.table.add({static_cast<std::uint64_t>(k + 1), st.S[k], st.X[k], static_cast<std::uint64_t>(st.argmax[k])});
    }
    if (st.capped) out.table.notes.push_back("stopped: S_n passed the time cap");
    return out;
  }
  rcp::DominationParams dp;
  dp.alpha = o.alpha;
  dp.M = static_cast<int>(g.vertex_count()) - 1;
  dp.log_n = o.logn;
  dp.rho = o.rho;
  dp.mu = o.mu;
  const auto law = rcp::DominationLaw::build(dp, o.workers);
  const auto r = rcp::chain_ratio_check(law, g, spec, p, o.chains, o.seed, o.workers);
  out.config["logn"] = o.logn;
  out.config["rho"] = o.rho;
  out.table.columns = {"statistic", "chains", "capped_chains", "samples", "atoms_hit", "violations",
                       "worst_z", "worst_atom", "worst_empirical", "worst_bound", "pass"};
  for (const auto& [name, a] : {std::pair{"ratio", r.ratio}, std::pair{"z", r.z}}) {
    out.table.add({std::string(name), static_cast<std::uint64_t>(r.chains), static_cast<std::uint64_t>(r.capped_chains),
                   static_cast<std::uint64_t>(a.samples), static_cast<std::uint64_t>(a.atoms_hit),
                   static_cast<std::uint64_t>(a.violations), a.worst_z, a.worst_atom, a.worst_empirical,
                   a.worst_bound, a.pass()});
  }
  out.checks.push_back({"ratio atoms within C p_j + 3 se", r.ratio.pass()});
  return out;
}

Output cmd_stairway(const Options& o) {
  const auto g = rcp::Graph::parse(o.graph);
  const auto walk = rcp::spanning_walk(g);
  const auto samples = rcp::stairway(walk.edges, g.edge_count(), o.lambda, o.t, o.runs, o.seed, o.workers);
  const std::size_t l = walk.length();
  const double ks = rcp::ks_statistic(samples, [&](double x) { return rcp::erlang_cdf(l, o.lambda, x); });
  const double crit = rcp::ks_critical_99(samples.size());
  Output out;
  out.command = "probe stairway";
  out.config = {{"graph", o.graph}, {"lambda", o.lambda}, {"t", o.t}, {"runs", o.runs}, {"seed", o.seed}};
  out.table.columns = {"graph", "l", "lambda", "t", "runs", "ks", "critical", "pass"};
  out.table.add({g.name(), static_cast<std::uint64_t>(l), o.lambda, o.t, static_cast<std::uint64_t>(o.runs), ks, crit,
                 ks < crit});
  out.checks.push_back({"stairway ks vs Erlang(l, lambda)", ks < crit});
  return out;
}

Output cmd_schedule(const Options& o) {
  const auto g = rcp::Graph::parse(o.graph);
  rcp::ScheduleParams p;
  p.epsilon = o.epsilon;
  p.gamma = o.gamma;
  p.n_min = o.n_min;
  p.n_max = o.n_max;
  p.t_scale = o.t_scale;
  const auto s = rcp::build_schedule(g, o.alpha, o.lambda, p);
  Output out;
  out.command = "probe schedule";
  out.config = {{"graph", o.graph}, {"lambda", o.lambda}, {"n_min", o.n_min}, {"n_max", o.n_max},
                {"t_scale", o.t_scale}, {"runs", o.probe_runs}, {"seed", o.seed}};
  out.config["epsilon"] = o.epsilon ? ordered_json(*o.epsilon) : ordered_json(nullptr);
  out.config["gamma"] = o.gamma ? ordered_json(*o.gamma) : ordered_json(nullptr);
  put_dist(out.config, o);
  auto& notes = out.table.notes;
  notes.push_back("feasible: " + std::string(s.feasible ? "true" : "false") + (s.reason.empty() ? "" : " (" + s.reason + ")"));
  notes.push_back("epsilon=" + rcp::format_double(s.epsilon) + " beta=" + rcp::format_double(s.beta) +
                  " gamma=" + rcp::format_double(s.gamma) + " l=" + std::to_string(s.walk_length));
  notes.push_back("log n0=" + rcp::format_double(s.log_n0) + "; probe times are t_scale * n (t_n needs n >= n0)");
  if (!s.feasible) {
    out.table.columns = {"n", "b_n", "c_n", "t_n", "probe_time"};
    return out;
  }
  if (o.probe_runs == 0) {
    out.table.columns = {"n", "b_n", "c_n", "t_n", "probe_time"};
    for (const auto& e : s.entries) {
      out.table.add({e.n, e.b, e.c, e.t ? Cell(*e.t) : Cell(std::string("")), e.probe_time});
    }
    return out;
  }
  const auto rows = rcp::probe_survival_events(s, dist_of(o, o.alpha), o.probe_runs, o.seed, o.workers, o.b_cap);
  out.table.columns = {"n", "probe_time", "a_threshold", "a_complement", "a_marginal", "a_marginal_pow_V",
                       "a_bound", "b_complement", "b_bound", "b_capped"};
  for (const auto& r : rows) {
    out.table.add({r.n, r.time, r.a_threshold, r.a_joint, r.a_marginal, r.a_product, r.a_bound, r.b_freq, r.b_bound,
                   r.b_capped});
  }
  return out;
}

Output cmd_audit(const Options& o) {
  rcp::SimConfig cfg;
  cfg.graph = rcp::Graph::parse(o.graph);
  cfg.dist = dist_of(o, o.alpha);
  cfg.lambda = o.lambda;
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  cfg.v0 = o.v0;
  const auto r = rcp::necessary_condition_audit(cfg, o.t_star, o.runs, o.workers);
  Output out;
  out.command = "probe audit";
  out.config = {{"graph", o.graph}, {"lambda", o.lambda}, {"horizon", o.horizon}, {"t_star", o.t_star},
                {"runs", o.runs}, {"seed", o.seed}};
  put_dist(out.config, o);
  out.table.columns = {"runs", "intervals_checked", "violations", "violating_runs", "pass"};
  out.table.add({static_cast<std::uint64_t>(r.runs), static_cast<std::uint64_t>(r.intervals_checked),
                 static_cast<std::uint64_t>(r.violations), static_cast<std::uint64_t>(r.violating_runs),
                 r.violations == 0});
  out.checks.push_back({"no interval alive without a transmission mark", r.violations == 0});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    if (const auto path = find_config_arg(argc, argv)) apply_config(rcp::Config::load(*path), o);
  } catch (const std::exception& e) {
    std::cerr << "rcp: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Renewal contact process laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Expand all help");
  app.add_option("--config", o.config_path, "Flat key = value file supplying defaults; flags override");
  app.add_option("--workers", o.workers, "Worker threads (output does not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Write output to this file instead of stdout");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", o.seed, "Master seed (fixed default, so bare runs are reproducible)");

  auto dist_flags = [&](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "Cure index alpha in (0,1)");
    c->add_option("--family", o.family, "Waiting-time family")->check(CLI::IsMember({"plain", "logcorrected"}));
    c->add_option("--kappa", o.kappa, "Log-correction exponent (logcorrected only)");
  };

  std::function<Output()> action;
  std::string default_format = "csv";
  auto bind = [&](CLI::App* c, std::function<Output(const Options&)> fn, const char* fmt = "csv") {
    c->callback([&, fn, fmt] {
      action = [&, fn] { return fn(o); };
      default_format = fmt;
    });
  };

  auto* sim = app.add_subcommand("simulate", "One replication; prints the SimResult");
  dist_flags(sim);
  sim->add_option("--graph", o.graph, "complete:k | path:k | cycle:k | star:k | file:PATH");
  sim->add_option("--lambda", o.lambda, "Transmission rate per edge (1/time)");
  sim->add_option("--horizon", o.horizon, "Simulation horizon (time)");
  sim->add_option("--v0", o.v0, "Initially infected vertex");
  sim->add_option("--checkpoints", o.checkpoints, "Survival checkpoints (times, ascending)")->delimiter(',');
  sim->add_option("--coupling-rate", o.coupling_rate, "Thinning base rate for coupling in lambda (0 = off)");
  sim->add_option("--max-events", o.max_events, "Event budget (0 = unlimited)");
  sim->add_option("--trace", o.trace_path, "Write the event trace CSV here");
  bind(sim, cmd_simulate, "json");

  auto* sweep = app.add_subcommand("sweep", "Survival-to-horizon table with Wilson intervals");
  sweep->add_option("--alphas", o.alphas, "Cure indices")->delimiter(',');
  sweep->add_option("--graphs", o.graphs, "Graph specs")->delimiter(',');
  sweep->add_option("--family", o.family, "Waiting-time family")->check(CLI::IsMember({"plain", "logcorrected"}));
  sweep->add_option("--kappa", o.kappa, "Log-correction exponent");
  sweep->add_option("--lambda", o.lambda, "Transmission rate per edge (1/time)");
  sweep->add_option("--horizons", o.horizons, "Horizons (times, ascending)")->delimiter(',');
  sweep->add_option("--runs", o.runs, "Replications per cell");
  sweep->add_option("--max-events", o.max_events, "Per-run event budget (0 = unlimited)");
  bind(sweep, cmd_sweep);

  auto* verify = app.add_subcommand("verify", "Renewal-theory verification campaigns");
  verify->require_subcommand(1);
  auto* et = verify->add_subcommand("et", "U(t+h) - U(t) against C_alpha h / m(t)");
  et->add_option("--alphas", o.alphas, "Cure indices")->delimiter(',');
  et->add_option("--family", o.family, "Waiting-time family")->check(CLI::IsMember({"plain", "logcorrected"}));
  et->add_option("--kappa", o.kappa, "Log-correction exponent");
  et->add_option("--t", o.ts, "Times t (comma list)")->delimiter(',');
  et->add_option("--window", o.h, "Window length (time)");
  et->add_option("--runs", o.runs, "Independent clocks per t");
  bind(et, cmd_verify_et);
  auto* dl = verify->add_subcommand("dl", "KS distance of E(t)/t to the limit law");
  dist_flags(dl);
  dl->add_option("--t", o.t, "Time t");
  dl->add_option("--n", o.n, "Independent clocks");
  dl->add_flag("--printed-constant", o.printed_constant, "Use 1/(Gamma(a)Gamma(2-a)) as the density constant");
  bind(dl, cmd_verify_dl);
  auto* tb = verify->add_subcommand("tailbound", "One-sided excess-time tail bounds");
  dist_flags(tb);
  tb->add_option("--which", o.which, "corollary32 | prop41");
  tb->add_option("--t", o.t, "Time t");
  tb->add_option("--m", o.m, "corollary32: window m (time); prop41: largest n checked (1..n)");
  tb->add_option("--eps", o.eps, "corollary32 epsilon");
  tb->add_option("--eta", o.eta, "prop41 eta");
  tb->add_option("--runs", o.runs, "Independent clocks");
  bind(tb, cmd_verify_tail);

  auto* theory = app.add_subcommand("theory", "Closed forms and quadratures");
  theory->require_subcommand(1);
  auto* thr = theory->add_subcommand("thresholds", "V-, V+ and the indeterminate sizes");
  thr->add_option("--alpha", o.alpha, "Cure index in (1/2,1)");
  thr->add_option("--grid", o.grid, "Instead of --alpha, an evenly spaced grid of this many alphas in (1/2,1)");
  bind(thr, cmd_thresholds);
  auto* el = theory->add_subcommand("elogy", "E[log max of M limit-law variables], quadrature and Monte Carlo");
  el->add_option("--alpha", o.alpha, "Cure index");
  el->add_option("--M", o.M, "Number of variables (|V| - 1)");
  el->add_option("--samples", o.samples, "Monte Carlo sample size");
  bind(el, cmd_elogy);
  auto* dom = theory->add_subcommand("domination", "Build the dominating law and check its theta-moment condition");
  dom->add_option("--alpha", o.alpha, "Cure index");
  dom->add_option("--M", o.M, "Number of variables");
  dom->add_option("--theta", o.theta, "Moment order (0 = search)");
  dom->add_option("--eta", o.dom_eta, "eta with (1+eta) e^{theta-alpha} < 1 (default 0.001)");
  dom->add_option("--logn", o.logn, "log N (integer)");
  dom->add_option("--rho", o.rho, "Mass added to each linear atom");
  dom->add_option("--mu", o.mu, "Bound mu in (Phi(theta), 1); default midpoint of the feasible range");
  bind(dom, cmd_domination);
  auto* ag = theory->add_subcommand("appendix-g", "Sign of G(x) = g(x) - x^{b(b+1)} g(1/x) on a log grid");
  ag->add_option("--alpha", o.alpha, "Cure index in (1/2,1)");
  ag->add_option("--points", o.points, "Grid points");
  ag->add_option("--xmax", o.xmax, "Grid end");
  bind(ag, cmd_appendix_g);

  auto* probe = app.add_subcommand("probe", "Survival and extinction machinery probes");
  probe->require_subcommand(1);
  auto* ch = probe->add_subcommand("chain", "Extinction chain, or with --chains its ratio check");
  dist_flags(ch);
  ch->add_option("--graph", o.graph, "Graph spec");
  ch->add_option("--v0", o.v0, "Initial vertex (single-chain mode)");
  ch->add_option("--t-star", o.t_star, "t* (time)");
  ch->add_option("--t-tilde", o.t_tilde, "t* / delta (time); only steps with X_n above it are compared");
  ch->add_option("--steps", o.steps, "Chain steps");
  ch->add_option("--time-cap", o.time_cap, "Stop a chain once S_n exceeds this time");
  ch->add_option("--chains", o.chains, "Chains for the ratio check (0 = print one chain)");
  ch->add_option("--logn", o.logn, "log N of the dominating law");
  ch->add_option("--rho", o.rho, "rho of the dominating law");
  bind(ch, cmd_chain);
  auto* st = probe->add_subcommand("stairway", "Stairway lengths against Erlang(l, lambda)");
  st->add_option("--graph", o.graph, "Graph spec");
  st->add_option("--lambda", o.lambda, "Transmission rate (1/time)");
  st->add_option("--t", o.t, "Start time");
  st->add_option("--runs", o.runs, "Samples");
  bind(st, cmd_stairway);
  auto* sc = probe->add_subcommand("schedule", "Schedule b_n, c_n, and with --runs the A_n / B_n frequencies");
  dist_flags(sc);
  sc->add_option("--graph", o.graph, "Graph spec");
  sc->add_option("--lambda", o.lambda, "Transmission rate (1/time)");
  sc->add_option("--epsilon", o.epsilon, "epsilon (default: half the largest with beta > 1)");
  sc->add_option("--gamma", o.gamma, "gamma > max(1, l/lambda)");
  sc->add_option("--n-min", o.n_min, "First n");
  sc->add_option("--n-max", o.n_max, "Last n");
  sc->add_option("--t-scale", o.t_scale, "Probe time per unit n (time)");
  sc->add_option("--runs", o.probe_runs, "Replications per n for the event probes (0 = schedule only)");
  sc->add_option("--b-cap", o.b_cap, "Most j values scanned for B_n");
  bind(sc, cmd_schedule);
  auto* au = probe->add_subcommand("audit", "Transmission marks in every extinction-chain interval");
  dist_flags(au);
  au->add_option("--graph", o.graph, "Graph spec");
  au->add_option("--lambda", o.lambda, "Transmission rate (1/time)");
  au->add_option("--horizon", o.horizon, "Horizon (time)");
  au->add_option("--t-star", o.t_star, "t* (time)");
  au->add_option("--runs", o.runs, "Traced runs");
  au->add_option("--v0", o.v0, "Initial vertex");
  bind(au, cmd_audit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const Output result = action();
    const std::string format = o.format.empty() ? default_format : o.format;
    if (o.out.empty()) {
      emit(result, format, std::cout);
    } else {
      std::ofstream f(o.out);
      if (!f) throw rcp::InputError("cannot write " + o.out);
      emit(result, format, f);
    }
    return result.all_pass() ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "rcp: " << e.what() << '\n';
    return kExitUsage;
  }
}
