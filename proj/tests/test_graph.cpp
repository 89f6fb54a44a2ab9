#include <gtest/gtest.h>

#include <sstream>

#include "rcp/graph.hpp"

namespace {

using rcp::Graph;

TEST(Graph, BuilderSizes) {
  EXPECT_EQ(Graph::complete(2).edge_count(), 1u);
  EXPECT_EQ(Graph::complete(6).edge_count(), 15u);
  EXPECT_EQ(Graph::complete(1).edge_count(), 0u);
  EXPECT_EQ(Graph::path(4).edge_count(), 3u);
  EXPECT_EQ(Graph::cycle(5).edge_count(), 5u);
  EXPECT_EQ(Graph::star(4).edge_count(), 3u);
  EXPECT_EQ(Graph::complete(6).name(), "complete:6");
}

TEST(Graph, RejectsMalformed) {
  EXPECT_THROW(Graph::custom(4, {{0, 1}, {2, 3}}), rcp::InputError);
  EXPECT_THROW(Graph::custom(2, {{0, 0}}), rcp::InputError);
  EXPECT_THROW(Graph::custom(2, {{0, 1}, {1, 0}}), rcp::InputError);
  EXPECT_THROW(Graph::custom(2, {{0, 5}}), rcp::InputError);
  EXPECT_THROW(Graph::complete(0), rcp::InputError);
  try {
    Graph::custom(4, {{0, 1}, {2, 3}});
  } catch (const rcp::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("disconnected"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(Graph, ParseSpecs) {
  EXPECT_EQ(Graph::parse("cycle:4").edge_count(), 4u);
  EXPECT_THROW(Graph::parse("complete"), rcp::InputError);
  EXPECT_THROW(Graph::parse("complete:x"), rcp::InputError);
  EXPECT_THROW(Graph::parse("complete:0"), rcp::InputError);
  EXPECT_THROW(Graph::parse("wheel:3"), rcp::InputError);
  EXPECT_THROW(Graph::parse("file:/nonexistent/edges.txt"), rcp::InputError);
}

TEST(Graph, EdgeListText) {
  std::istringstream in("# triangle\n0 1\n1 2 # closing edge next\n\n2 0\n");
  const auto g = Graph::from_edge_list(in);
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  std::istringstream bad("0 1\n1\n");
  EXPECT_THROW(Graph::from_edge_list(bad), rcp::InputError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(Graph::from_edge_list(empty), rcp::InputError);
}

TEST(SpanningWalk, SingleVertexIsEmpty) {
  const auto w = rcp::spanning_walk(Graph::complete(1));
  EXPECT_EQ(w.length(), 0u);
  EXPECT_TRUE(rcp::covers_all_pairs(w, 1));
}

TEST(SpanningWalk, PathOfThree) {
  const auto w = rcp::spanning_walk(Graph::path(3));
  EXPECT_EQ(w.length(), 8u);
  EXPECT_EQ(w.vertices, (std::vector<rcp::Vertex>{0, 1, 2, 1, 0, 1, 2, 1, 0}));
  EXPECT_TRUE(rcp::covers_all_pairs(w, 3));
}

TEST(SpanningWalk, StarNeedsTheSecondTour) {
  const auto g = Graph::star(4);
  const auto w = rcp::spanning_walk(g);
  EXPECT_TRUE(rcp::covers_all_pairs(w, 4));
  rcp::SpanningWalk once;
  once.vertices.assign(w.vertices.begin(), w.vertices.begin() + 7);  // 0,1,0,2,0,3,0
  once.edges.assign(w.edges.begin(), w.edges.begin() + 6);
  EXPECT_FALSE(rcp::covers_all_pairs(once, 4));
}

TEST(SpanningWalk, CoversAllPairsOnSmallGraphs) {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (const auto& g : {Graph::complete(n), Graph::path(n), Graph::star(n)}) {
      const auto w = rcp::spanning_walk(g);
      EXPECT_TRUE(rcp::covers_all_pairs(w, n)) << g.name();
      EXPECT_LE(w.length(), 4 * (n - 1)) << g.name();
      ASSERT_EQ(w.vertices.size(), w.length() + 1);
      for (std::size_t i = 0; i < w.length(); ++i) {
        const auto [u, v] = g.edge(w.edges[i]);
        EXPECT_TRUE((u == w.vertices[i] && v == w.vertices[i + 1]) || (v == w.vertices[i] && u == w.vertices[i + 1]));
      }
    }
    if (n >= 3) {
      EXPECT_TRUE(rcp::covers_all_pairs(rcp::spanning_walk(Graph::cycle(n)), n));
    }
  }
}

}  // namespace
