#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcp/error.hpp"
#include "rcp/graph.hpp"
#include "rcp/heavytail.hpp"
#include "rcp/renewal.hpp"
#include "rcp/rng.hpp"

namespace rcp {

struct SimConfig {
  Graph graph = Graph::complete(1);
  HeavyTailSpec dist{};
  double lambda = 1.0;
  Vertex v0 = 0;
  double horizon = 100.0;
  std::uint64_t seed = 1;
  bool trace = false;
  std::vector<double> checkpoints;
  // When > lambda, edge clocks run at this rate and each candidate mark is
  // kept with probability lambda / coupling_rate from a separate stream.
  // Runs sharing (seed, coupling_rate) are then coupled monotonically in lambda.
  double coupling_rate = 0.0;
  // 0 = unlimited.
  std::uint64_t max_events = 0;
  std::size_t max_trace_records = 50'000'000;

  void validate() const {
    dist.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and > 0");
    if (v0 >= graph.vertex_count()) throw InputError("initial vertex v0 is not a vertex of the graph");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be finite and > 0");
    if (coupling_rate != 0.0 && !(coupling_rate >= lambda && std::isfinite(coupling_rate))) {
      throw InputError("coupling_rate must be 0 (off) or a finite rate >= lambda");
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      if (!(checkpoints[i] > 0.0 && checkpoints[i] <= horizon)) {
        throw InputError("checkpoints must lie in (0, horizon]");
      }
      if (i > 0 && checkpoints[i] < checkpoints[i - 1]) {
        throw InputError("checkpoints must be sorted ascending");
      }
    }
  }
};

inline std::uint64_t vertex_stream_seed(std::uint64_t seed, Vertex x) {
  return derive_seed(seed, StreamTag::vertex, x);
}
inline std::uint64_t edge_stream_seed(std::uint64_t seed, EdgeId e) {
  return derive_seed(seed, StreamTag::edge, e);
}
inline std::uint64_t edge_thinning_seed(std::uint64_t seed, EdgeId e) {
  return derive_seed(seed, StreamTag::edge_thinning, e);
}

// Transmission marks of one edge: a rate-max(lambda, coupling) Poisson clock,
// thinned to rate lambda when coupled.
class TransmissionClock {
 public:
  TransmissionClock(double lambda, double coupling_rate, std::uint64_t seed, EdgeId e)
      : clock_(ExponentialRate{std::max(lambda, coupling_rate)}, edge_stream_seed(seed, e)),
        thinning_(edge_thinning_seed(seed, e)),
        keep_(lambda / std::max(lambda, coupling_rate)) {}

  double next_candidate() const noexcept { return clock_.next_mark(); }

  // Materialises the candidate mark at next_candidate(); true if it is a
  // transmission mark at the simulated rate.
  bool pop() {
    clock_.advance_to(clock_.next_mark());
    return keep_ >= 1.0 || thinning_.uniform() < keep_;
  }

 private:
  RenewalClock<ExponentialRate> clock_;
  RandomStream thinning_;
  double keep_;
};

struct SimResult {
  std::optional<double> extinction_time;
  bool censored = false;
  std::vector<bool> survival_at_checkpoints;
  std::size_t peak_infected = 1;
  std::uint64_t events_processed = 0;
  std::vector<bool> final_state;
};

inline bool operator==(const SimResult& a, const SimResult& b) {
  return a.extinction_time == b.extinction_time && a.censored == b.censored &&
         a.survival_at_checkpoints == b.survival_at_checkpoints &&
         a.peak_infected == b.peak_infected && a.events_processed == b.events_processed &&
         a.final_state == b.final_state;
}

enum class TraceKind { cure, transmit, infect, recover, extinct };

inline std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::cure: return "cure";
    case TraceKind::transmit: return "transmit";
    case TraceKind::infect: return "infect";
    case TraceKind::recover: return "recover";
    case TraceKind::extinct: return "extinct";
  }
  return "?";
}

inline constexpr std::int64_t kNoDetail = -1;

// cure:     id = vertex, detail = -1
// transmit: id = edge,   detail = vertex newly infected by this mark, or -1
// infect:   id = vertex, detail = edge that carried the infection (-1 for v0 at time 0)
// recover:  id = vertex, detail = -1
// extinct:  id = 0,      detail = -1
struct TraceRecord {
  double time;
  TraceKind kind;
  std::size_t id;
  std::int64_t detail;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SimTrace {
  SimResult result;
  std::vector<TraceRecord> log;
};

namespace detail {

enum class EventKind : std::uint8_t { cure = 0, transmit = 1 };

struct Event {
  double time;
  EventKind kind;
  std::size_t index;
};

// Earliest first; at equal times cures before transmissions, then by index.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const noexcept {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.index > b.index;
  }
};

template <bool Tracing>
SimResult run_engine(const SimConfig& cfg, std::vector<TraceRecord>* log) {
  cfg.validate();
  const Graph& g = cfg.graph;
  const std::size_t n = g.vertex_count();

  std::vector<RenewalClock<HeavyTailSpec>> cures;
  cures.reserve(n);
  for (Vertex x = 0; x < n; ++x) cures.emplace_back(cfg.dist, vertex_stream_seed(cfg.seed, x));
  std::vector<TransmissionClock> edges;
  edges.reserve(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    edges.emplace_back(cfg.lambda, cfg.coupling_rate, cfg.seed, e);
  }

  std::priority_queue<Event, std::vector<Event>, EventAfter> calendar;
  auto schedule_cure = [&](Vertex x) {
    if (cures[x].next_mark() <= cfg.horizon) calendar.push({cures[x].next_mark(), EventKind::cure, x});
  };
  auto schedule_edge = [&](EdgeId e) {
    if (edges[e].next_candidate() <= cfg.horizon) {
      calendar.push({edges[e].next_candidate(), EventKind::transmit, e});
    }
  };
  for (Vertex x = 0; x < n; ++x) schedule_cure(x);
  for (EdgeId e = 0; e < g.edge_count(); ++e) schedule_edge(e);

  std::vector<bool> infected(n, false);
  infected[cfg.v0] = true;
  std::size_t infected_count = 1;

  SimResult result;
  auto record = [&](double t, TraceKind k, std::size_t id, std::int64_t detail) {
    if constexpr (Tracing) {
      if (log->size() >= cfg.max_trace_records) {
        std::ostringstream os;
        os << "trace budget of " << cfg.max_trace_records << " records exhausted at t=" << t
           << " after " << result.events_processed << " events";
        throw ResourceError(os.str());
      }
      log->push_back({t, k, id, detail});
    }
  };
  record(0.0, TraceKind::infect, cfg.v0, kNoDetail);

  while (!calendar.empty()) {
    const Event ev = calendar.top();
    calendar.pop();
    if (cfg.max_events != 0 && result.events_processed >= cfg.max_events) {
      std::ostringstream os;
      os << "event budget of " << cfg.max_events << " exhausted at t=" << ev.time
         << " with " << infected_count << " infected";
      throw ResourceError(os.str());
    }
    if (ev.kind == EventKind::cure) {
      const Vertex x = ev.index;
      cures[x].advance_to(ev.time);
      ++result.events_processed;
      record(ev.time, TraceKind::cure, x, kNoDetail);
      if (infected[x]) {
        infected[x] = false;
        --infected_count;
        record(ev.time, TraceKind::recover, x, kNoDetail);
        if (infected_count == 0) {
          result.extinction_time = ev.time;
          record(ev.time, TraceKind::extinct, 0, kNoDetail);
          break;
        }
      }
      schedule_cure(x);
    } else {
      const EdgeId e = ev.index;
      const bool real = edges[e].pop();
      if (real) {
        ++result.events_processed;
        const auto [u, v] = g.edge(e);
        std::int64_t newly = kNoDetail;
        if (infected[u] != infected[v]) {
          const Vertex target = infected[u] ? v : u;
          infected[target] = true;
          ++infected_count;
          result.peak_infected = std::max(result.peak_infected, infected_count);
          newly = static_cast<std::int64_t>(target);
        }
        record(ev.time, TraceKind::transmit, e, newly);
        if (newly != kNoDetail) record(ev.time, TraceKind::infect, static_cast<std::size_t>(newly), static_cast<std::int64_t>(e));
      }
      schedule_edge(e);
    }
  }

  result.censored = !result.extinction_time.has_value();
  result.final_state = infected;
  result.survival_at_checkpoints.reserve(cfg.checkpoints.size());
  for (double c : cfg.checkpoints) {
    result.survival_at_checkpoints.push_back(result.censored || *result.extinction_time > c);
  }
  return result;
}

}  // namespace detail

// One replication of the renewal contact process on cfg.graph, started from
// the single infected vertex cfg.v0 and run until extinction or cfg.horizon.
inline SimResult simulate(const SimConfig& cfg) { return detail::run_engine<false>(cfg, nullptr); }

// As simulate, also returning every cure/transmit mark processed and every
// state change, in processing order.
inline SimTrace simulate_trace(const SimConfig& cfg) {
  SimTrace out;
  out.result = detail::run_engine<true>(cfg, &out.log);
  return out;
}

// Rebuilds the SimResult from a trace log alone.
inline SimResult replay(const std::vector<TraceRecord>& log, const SimConfig& cfg) {
  const std::size_t n = cfg.graph.vertex_count();
  SimResult result;
  std::vector<bool> infected(n, false);
  std::size_t count = 0;
  result.peak_infected = 0;
  for (const auto& r : log) {
    switch (r.kind) {
      case TraceKind::cure:
      case TraceKind::transmit:
        ++result.events_processed;
        break;
      case TraceKind::infect:
        infected.at(r.id) = true;
        ++count;
        result.peak_infected = std::max(result.peak_infected, count);
        break;
      case TraceKind::recover:
        infected.at(r.id) = false;
        --count;
        break;
      case TraceKind::extinct:
        result.extinction_time = r.time;
        break;
    }
  }
  result.censored = !result.extinction_time.has_value();
  result.final_state = infected;
  for (double c : cfg.checkpoints) {
    result.survival_at_checkpoints.push_back(result.censored || *result.extinction_time > c);
  }
  return result;
}

// Infected set after all log entries with time <= t have been applied.
inline std::vector<bool> state_at(const std::vector<TraceRecord>& log, std::size_t n_vertices,
                                  double t) {
  std::vector<bool> infected(n_vertices, false);
  for (const auto& r : log) {
    if (r.time > t) break;
    if (r.kind == TraceKind::infect) infected.at(r.id) = true;
    if (r.kind == TraceKind::recover) infected.at(r.id) = false;
  }
  return infected;
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& log) {
  out << "time,kind,id,detail\n";
  const auto old = out.precision(17);
  for (const auto& r : log) {
    out << r.time << ',' << to_string(r.kind) << ',' << r.id << ',' << r.detail << '\n';
  }
  out.precision(old);
}

}  // namespace rcp
