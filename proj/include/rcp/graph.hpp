#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcp/error.hpp"

namespace rcp {

using Vertex = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  Vertex u;
  Vertex v;

  Vertex other(Vertex x) const noexcept { return x == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  Vertex neighbour;
  EdgeId edge;
};

// Finite connected simple graph on vertices 0..n-1. Edges keep the index
// they were given at construction; the index keys the edge's random stream.
class Graph {
 public:
  static Graph complete(std::size_t k) {
    std::vector<Edge> edges;
    for (Vertex x = 0; x < k; ++x)
      for (Vertex y = x + 1; y < k; ++y) edges.push_back({x, y});
    return Graph(k, std::move(edges), "complete:" + std::to_string(k));
  }

  static Graph path(std::size_t k) {
    std::vector<Edge> edges;
    for (Vertex x = 0; x + 1 < k; ++x) edges.push_back({x, x + 1});
    return Graph(k, std::move(edges), "path:" + std::to_string(k));
  }

  // cycle(k) for k < 3 degenerates to path(k); there are no multi-edges.
  static Graph cycle(std::size_t k) {
    std::vector<Edge> edges;
    for (Vertex x = 0; x + 1 < k; ++x) edges.push_back({x, x + 1});
    if (k >= 3) edges.push_back({k - 1, 0});
    return Graph(k, std::move(edges), "cycle:" + std::to_string(k));
  }

  // Centre 0, leaves 1..k-1.
  static Graph star(std::size_t k) {
    std::vector<Edge> edges;
    for (Vertex x = 1; x < k; ++x) edges.push_back({0, x});
    return Graph(k, std::move(edges), "star:" + std::to_string(k));
  }

  static Graph custom(std::size_t n, std::vector<Edge> edges, std::string name = "custom") {
    return Graph(n, std::move(edges), std::move(name));
  }

  // Edge list: one "u v" pair per line, '#' starts a comment. The vertex
  // count is one more than the largest index mentioned.
  static Graph from_edge_list(std::istream& in, std::string name = "custom") {
    std::vector<Edge> edges;
    std::size_t n = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      long long u = 0;
      long long v = 0;
      if (!(ls >> u)) continue;
      std::string rest;
      if (!(ls >> v) || (ls >> rest) || u < 0 || v < 0) {
        throw InputError("edge list line " + std::to_string(lineno) +
                         ": expected two non-negative vertex indices");
      }
      edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
      n = std::max({n, static_cast<std::size_t>(u) + 1, static_cast<std::size_t>(v) + 1});
    }
    if (n == 0) throw InputError("edge list is empty");
    return Graph(n, std::move(edges), std::move(name));
  }

  static Graph from_edge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read edge list file '" + path + "'");
    return from_edge_list(in, "file:" + path);
  }

  // "complete:6", "path:3", "cycle:5", "star:4", "file:edges.txt".
  static Graph parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InputError("graph spec '" + spec + "' lacks ':'");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "file") return from_edge_file(arg);
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(arg, &used);
      if (used != arg.size() || v < 1) throw InputError("");
      k = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw InputError("graph spec '" + spec + "': size must be an integer >= 1");
    }
    if (kind == "complete") return complete(k);
    if (kind == "path") return path(k);
    if (kind == "cycle") return cycle(k);
    if (kind == "star") return star(k);
    throw InputError("unknown graph kind '" + kind + "' (complete, path, cycle, star, file)");
  }

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Incidence>& incident(Vertex x) const { return adjacency_.at(x); }
  const std::string& name() const noexcept { return name_; }

 private:
  Graph(std::size_t n, std::vector<Edge> edges, std::string name)
      : n_(n), edges_(std::move(edges)), adjacency_(n), name_(std::move(name)) {
    if (n_ == 0) throw InputError("graph must have at least one vertex");
    std::set<std::pair<Vertex, Vertex>> seen;
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      if (u >= n_ || v >= n_) throw InputError("edge endpoint out of range");
      if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
      if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
        throw InputError("duplicate edge <" + std::to_string(u) + "," + std::to_string(v) + ">");
      }
      adjacency_[u].push_back({v, e});
      adjacency_[v].push_back({u, e});
    }
    for (auto& inc : adjacency_) {
      std::sort(inc.begin(), inc.end(),
                [](const Incidence& a, const Incidence& b) { return a.neighbour < b.neighbour; });
    }
    require_connected();
  }

  void require_connected() const {
    std::vector<bool> seen(n_, false);
    std::vector<Vertex> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (const auto& inc : adjacency_[x]) {
        if (!seen[inc.neighbour]) {
          seen[inc.neighbour] = true;
          stack.push_back(inc.neighbour);
        }
      }
    }
    std::ostringstream missing;
    bool disconnected = false;
    for (Vertex x = 0; x < n_; ++x) {
      if (!seen[x]) {
        missing << (disconnected ? "," : "") << x;
        disconnected = true;
      }
    }
    if (disconnected) {
      throw InputError("graph is disconnected: vertices {" + missing.str() +
                       "} are separated from vertex 0");
    }
  }

  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::string name_;
};

// Edge walk (e_1..e_l) with e_i = <v_{i-1}, v_i> such that every ordered pair
// (x, y) of vertices is joined by a contiguous sub-walk from x to y.
struct SpanningWalk {
  std::vector<EdgeId> edges;
  std::vector<Vertex> vertices;  // v_0 .. v_l

  std::size_t length() const noexcept { return edges.size(); }
};

// Euler tour of the doubled DFS spanning tree rooted at 0, traversed twice.
// A single tour misses pairs such as (last leaf, first leaf) of a star; the
// second pass supplies them. Length 4(n-1).
inline SpanningWalk spanning_walk(const Graph& g) {
  SpanningWalk walk;
  walk.vertices.push_back(0);
  if (g.vertex_count() == 1) return walk;

  std::vector<bool> visited(g.vertex_count(), false);
  std::vector<EdgeId> tour;
  std::vector<Vertex> tour_vertices{0};
  auto dfs = [&](auto&& self, Vertex x) -> void {
    visited[x] = true;
    for (const auto& inc : g.incident(x)) {
      if (visited[inc.neighbour]) continue;
      tour.push_back(inc.edge);
      tour_vertices.push_back(inc.neighbour);
      self(self, inc.neighbour);
      tour.push_back(inc.edge);
      tour_vertices.push_back(x);
    }
  };
  dfs(dfs, 0);

  walk.edges = tour;
  walk.edges.insert(walk.edges.end(), tour.begin(), tour.end());
  walk.vertices = tour_vertices;
  walk.vertices.insert(walk.vertices.end(), tour_vertices.begin() + 1, tour_vertices.end());
  return walk;
}

// True iff every ordered pair (x, y) has a contiguous sub-walk from x to y
// (the trivial sub-walk covers x == y).
inline bool covers_all_pairs(const SpanningWalk& walk, std::size_t n_vertices) {
  std::vector<std::vector<bool>> covered(n_vertices, std::vector<bool>(n_vertices, false));
  for (Vertex x = 0; x < n_vertices; ++x) covered[x][x] = true;
  const auto& vs = walk.vertices;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) covered[vs[i]][vs[j]] = true;
  for (const auto& row : covered)
    if (std::find(row.begin(), row.end(), false) != row.end()) return false;
  return true;
}

}  // namespace rcp
