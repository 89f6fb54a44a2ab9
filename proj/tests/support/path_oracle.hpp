#pragma once

// Brute-force infected sets from the path definition of the graphical
// construction, computed from the raw marks alone (no event calendar).
//
// A path from (v0, 0) visits x_0 = v0, x_1, ... with jump times t_1 < t_2 < ...
// It needs, for every hop x_i -> x_{i+1} at t_{i+1}:
//   (a) <x_i, x_{i+1}> is an edge,
//   (b) t_{i+1} is a mark of that edge after t_i,
//   (c) x_i has no cure mark in (t_i, t_{i+1}],
// and at the final vertex no cure in (t_last, t].
//
// Reading::harris lets (b) use any later mark of the edge. Reading::literal
// takes "E_e(t_i) = t_{i+1} - t_i" at face value: only the first mark of the
// edge after t_i may be used.

#include <algorithm>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "rcp/engine.hpp"

namespace oracle {

struct Marks {
  std::vector<std::vector<double>> cures;  // per vertex, ascending
  std::vector<std::vector<double>> edges;  // per edge, ascending
};

// Every mark <= horizon, drawn from the same streams the engine uses.
inline Marks draw_marks(const rcp::SimConfig& cfg) {
  Marks m;
  for (rcp::Vertex x = 0; x < cfg.graph.vertex_count(); ++x) {
    rcp::RenewalClock<rcp::HeavyTailSpec> c(cfg.dist, rcp::vertex_stream_seed(cfg.seed, x));
    m.cures.push_back(c.advance_collect(cfg.horizon));
  }
  for (rcp::EdgeId e = 0; e < cfg.graph.edge_count(); ++e) {
    rcp::RenewalClock<rcp::ExponentialRate> c(rcp::ExponentialRate{cfg.lambda}, rcp::edge_stream_seed(cfg.seed, e));
    m.edges.push_back(c.advance_collect(cfg.horizon));
  }
  return m;
}

enum class Reading { harris, literal };

inline double next_after(const std::vector<double>& marks, double t) {
  const auto it = std::upper_bound(marks.begin(), marks.end(), t);
  return it == marks.end() ? std::numeric_limits<double>::infinity() : *it;
}

// Per vertex, the intervals [arrival, next cure) during which some path sits there.
class Reachability {
 public:
  Reachability(const rcp::Graph& g, const Marks& m, rcp::Vertex v0, Reading reading)
      : windows_(g.vertex_count()) {
    std::set<std::pair<rcp::Vertex, double>> seen{{v0, 0.0}};
    std::vector<std::pair<rcp::Vertex, double>> todo{{v0, 0.0}};
    while (!todo.empty()) {
      const auto [x, a] = todo.back();
      todo.pop_back();
      const double cure = next_after(m.cures[x], a);
      windows_[x].emplace_back(a, cure);
      for (const auto& inc : g.incident(x)) {
        const auto& marks = m.edges[inc.edge];
        auto it = std::upper_bound(marks.begin(), marks.end(), a);
        const auto stop = reading == Reading::literal && it != marks.end() ? std::next(it) : marks.end();
        for (; it != stop && *it < cure; ++it) {
          if (seen.emplace(inc.neighbour, *it).second) todo.emplace_back(inc.neighbour, *it);
        }
      }
    }
  }

  // Right-continuous state: a jump exactly at t counts as arrived.
  std::vector<bool> state(double t) const {
    std::vector<bool> out(windows_.size(), false);
    for (std::size_t x = 0; x < windows_.size(); ++x) {
      for (const auto& [a, c] : windows_[x]) {
        if (a <= t && t < c) {
          out[x] = true;
          break;
        }
      }
    }
    return out;
  }

 private:
  std::vector<std::vector<std::pair<double, double>>> windows_;
};

struct Comparison {
  std::size_t times_checked = 0;
  std::size_t mismatches = 0;
};

// Engine state after every processed mark, and at the horizon, against the oracle.
inline Comparison compare_with_engine(const rcp::SimConfig& cfg, Reading reading = Reading::harris) {
  const auto trace = rcp::simulate_trace(cfg);
  const Reachability reach(cfg.graph, draw_marks(cfg), cfg.v0, reading);
  Comparison c;
  std::vector<double> times;
  for (const auto& r : trace.log) {
    if (r.kind == rcp::TraceKind::cure || r.kind == rcp::TraceKind::transmit) times.push_back(r.time);
  }
  times.push_back(cfg.horizon);
  const std::size_t n = cfg.graph.vertex_count();
  for (double t : times) {
    ++c.times_checked;
    if (rcp::state_at(trace.log, n, t) != reach.state(t)) ++c.mismatches;
  }
  return c;
}

}  // namespace oracle
