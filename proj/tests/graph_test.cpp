// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "oracles.hpp"
#include "vineskel/error.hpp"
#include "vineskel/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>

namespace vineskel {
namespace {

using testing::Gen;

using testing::edge_set;
using testing::exhaustive_mst_weight;
using testing::quadratic_edges;
using testing::random_connected_graph;
using testing::UnionFind;

std::size_t oracle_cycle_rank(const SpatialGraph& g) {
  UnionFind uf(g.node_count());
  std::size_t c = g.node_count();
  for (const auto& e : g.edges()) c -= uf.unite(e.i, e.j) ? 1 : 0;
  return g.edge_count() + c - g.node_count();
}

TEST(LocalGraph, InclusiveBoundary) {
  const auto g = build_local_graph(std::vector<Eigen::Vector3d>{{0, 0, 0}, {0.03, 0, 0}}, 0.03);
  EXPECT_EQ(g.edge_count(), 1u);
  const auto h = build_local_graph(std::vector<Eigen::Vector3d>{{0, 0, 0}, {0.0303, 0, 0}}, 0.03);
  EXPECT_EQ(h.edge_count(), 0u);
  EXPECT_EQ(connected_clusters(h).size(), 2u);
}

TEST(LocalGraph, CoincidentPointsNotLinked) {
  const auto g = build_local_graph(std::vector<Eigen::Vector3d>{{0, 0, 0}, {0, 0, 0}, {0.01, 0, 0}}, 0.03);
  EXPECT_EQ(edge_set(g), (std::set<std::pair<NodeId, NodeId>>{{0, 2}, {1, 2}}));
}

TEST(LocalGraph, MatchesQuadraticOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Gen g(seed);
    const auto pts = g.points(200);
    const double r = g.uniform(0.05, 0.2);
    const auto graph = build_local_graph(pts, r);
    ASSERT_EQ(edge_set(graph), quadratic_edges(pts, r));
    for (const auto& e : graph.edges()) {
      ASSERT_LT(e.i, e.j);
      ASSERT_NEAR(e.weight, (pts[e.i] - pts[e.j]).norm(), 1e-12);
    }
  }
}

TEST(SpatialGraphType, NormalisesAndRejects) {
  const SpatialGraph g({{0, 0, 0}, {1, 0, 0}}, {{1, 0, 1.0}});
  EXPECT_EQ(g.edges()[0].i, 0u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_THROW(SpatialGraph({{0, 0, 0}}, {{0, 0, 0.0}}), InvalidParameter);
  EXPECT_THROW(SpatialGraph({{0, 0, 0}, {1, 0, 0}}, {{0, 1, 1.0}, {1, 0, 1.0}}), InvalidParameter);
  EXPECT_THROW(SpatialGraph({{0, 0, 0}}, {{0, 3, 1.0}}), InvalidParameter);
}

TEST(Clusters, EdgelessAndPath) {
  const SpatialGraph iso(std::vector<Eigen::Vector3d>(5, Eigen::Vector3d::Zero()));
  EXPECT_EQ(connected_clusters(iso).size(), 5u);
  const SpatialGraph path({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_EQ(connected_clusters(path).size(), 1u);
}

TEST(Clusters, MatchesUnionFindAndOrdering) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Gen g(seed);
    const auto graph = build_local_graph(g.points(150), 0.12);
    const auto clusters = connected_clusters(graph);
    UnionFind uf(graph.node_count());
    for (const auto& e : graph.edges()) uf.unite(e.i, e.j);
    std::set<std::size_t> roots;
    for (std::size_t v = 0; v < graph.node_count(); ++v) roots.insert(uf.find(v));
    ASSERT_EQ(clusters.size(), roots.size());
    std::vector<int> seen(graph.node_count(), 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (auto v : clusters[c]) {
        ++seen[v];
        ASSERT_EQ(uf.find(v), uf.find(clusters[c].front()));
      }
      ASSERT_TRUE(std::is_sorted(clusters[c].begin(), clusters[c].end()));
      if (c > 0) {
        const auto& p = clusters[c - 1];
        ASSERT_TRUE(p.size() > clusters[c].size() || (p.size() == clusters[c].size() && p.front() < clusters[c].front()));
      }
    }
    for (int s : seen) ASSERT_EQ(s, 1);
  }
}

TEST(Kruskal, SmallCases) {
  const SpatialGraph one({{0, 0, 0}});
  EXPECT_EQ(kruskal_mst(one, {0}).edge_count(), 0u);
  const SpatialGraph tri({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}});
  const auto t = kruskal_mst(tri, {0, 1, 2});
  EXPECT_EQ(edge_set(t), (std::set<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}}));
  EXPECT_DOUBLE_EQ(t.total_weight(), 3.0);
}

TEST(Kruskal, DisconnectedClusterThrows) {
  const SpatialGraph g({{0, 0, 0}, {1, 0, 0}, {5, 0, 0}}, {{0, 1, 1.0}});
  EXPECT_THROW(kruskal_mst(g, {0, 1, 2}), InvalidCluster);
}

TEST(Kruskal, DeterministicTieBreak) {
  // Square with equal sides: the lexicographically smallest edges win.
  const SpatialGraph sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}},
                        {{2, 3, 1.0}, {1, 2, 1.0}, {0, 3, 1.0}, {0, 1, 1.0}});
  EXPECT_EQ(edge_set(kruskal_mst(sq, {0, 1, 2, 3})), (std::set<std::pair<NodeId, NodeId>>{{0, 1}, {0, 3}, {1, 2}}));
}

TEST(Kruskal, MatchesExhaustiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Gen g(seed);
    const auto n = static_cast<std::size_t>(g.integer(1, 7));
    const auto graph = random_connected_graph(g, n);
    std::vector<NodeId> cluster(n);
    std::iota(cluster.begin(), cluster.end(), 0);
    const auto t = kruskal_mst(graph, cluster);
    ASSERT_EQ(t.edge_count(), n - 1);
    ASSERT_EQ(oracle_cycle_rank(t), 0u);
    ASSERT_NEAR(t.total_weight(), exhaustive_mst_weight(n, graph.edges()), 1e-12) << seed;
  }
}

TEST(SpanningForest, SpansEveryCluster) {
  Gen g(3);
  const auto graph = build_local_graph(g.points(300), 0.1);
  const auto f = minimum_spanning_forest(graph);
  EXPECT_EQ(oracle_cycle_rank(f), 0u);
  EXPECT_EQ(connected_clusters(f).size(), connected_clusters(graph).size());
  for (const auto& e : f.edges()) EXPECT_TRUE(graph.has_edge(e.i, e.j));
}

TEST(CycleRank, MatchesOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Gen g(seed);
    const auto graph = build_local_graph(g.points(100), 0.15);
    EXPECT_EQ(cycle_rank(graph), oracle_cycle_rank(graph));
  }
}

std::vector<Eigen::Vector3d> ring(int n, double radius) {
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    pts.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return pts;
}

TEST(Closure, RingRestoresBrokenEdge) {
  // Chord of a 20-point ring of radius 0.1 is ~0.0313; r_s just above it.
  const auto pts = ring(20, 0.1);
  const auto local = build_local_graph(pts, 0.032);
  ASSERT_EQ(local.edge_count(), 20u);
  const auto mst = minimum_spanning_forest(local);
  ASSERT_EQ(mst.edge_count(), 19u);
  for (auto mode : {ClosureMode::sequential, ClosureMode::snapshot}) {
    const auto closed = close_mst_cycles(mst, local, 0.15, mode);
    EXPECT_EQ(closed.added.size(), 1u);
    EXPECT_EQ(cycle_rank(closed.graph), 1u);
    EXPECT_EQ(edge_set(closed.graph), edge_set(local));
  }
}

TEST(Closure, SplitBarbTipNotConnected) {
  // Stem 0-1-2, tips 3 and 4 forked off node 2, close to each other.
  const std::vector<Eigen::Vector3d> pts{{0, 0, 0}, {0.02, 0, 0}, {0.04, 0, 0}, {0.06, 0.005, 0}, {0.06, -0.005, 0}};
  const auto local = build_local_graph(pts, 0.025);
  const auto mst = minimum_spanning_forest(local);
  const auto closed = close_mst_cycles(mst, local, 0.15);
  EXPECT_TRUE(closed.added.empty());
  EXPECT_EQ(closed.graph.edge_count(), mst.edge_count());
}

TEST(Closure, TreeWithoutLeafPairsUnchanged) {
  const std::vector<Eigen::Vector3d> pts{{0, 0, 0}, {0.02, 0, 0}, {0.04, 0, 0}, {0.06, 0, 0}};
  const auto local = build_local_graph(pts, 0.025);
  const auto closed = close_mst_cycles(minimum_spanning_forest(local), local, 0.15);
  EXPECT_TRUE(closed.added.empty());
}

// A ring broken at one gap where each side forks into two leaves: the
// snapshot rule closes both leaf pairs, the sequential rule only the first.
TEST(Closure, SequentialAvoidsParallelRails) {
  auto at = [](double slot, double radius) {
    const double a = 2.0 * std::numbers::pi * slot / 32.0;
    return Eigen::Vector3d(radius * std::cos(a), radius * std::sin(a), 0.0);
  };
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < 30; ++k) pts.push_back(at(k, 0.1));
  pts.push_back(at(31, 0.096));  // 30: leaf beside node 0
  pts.push_back(at(31, 0.104));  // 31
  pts.push_back(at(30, 0.096));  // 32: leaf beside node 29
  pts.push_back(at(30, 0.104));  // 33
  auto edge = [&](NodeId a, NodeId b) { return GraphEdge{a, b, (pts[a] - pts[b]).norm()}; };
  std::vector<GraphEdge> tree;
  for (NodeId k = 0; k + 1 < 30; ++k) tree.push_back(edge(k, k + 1));
  for (NodeId l : {30u, 31u}) tree.push_back(edge(0, l));
  for (NodeId l : {32u, 33u}) tree.push_back(edge(29, l));
  auto local_edges = tree;
  local_edges.push_back(edge(30, 32));
  local_edges.push_back(edge(31, 33));
  const SpatialGraph mst(pts, tree), local(pts, local_edges);
  const auto snap = close_mst_cycles(mst, local, 0.15, ClosureMode::snapshot);
  const auto seq = close_mst_cycles(mst, local, 0.15, ClosureMode::sequential);
  EXPECT_EQ(snap.added.size(), 2u);
  ASSERT_EQ(seq.added.size(), 1u);
  EXPECT_EQ(seq.added[0].i, 30u);
  EXPECT_EQ(cycle_rank(seq.graph), 1u);
}

// Independent closure oracles: Floyd-Warshall distances on the graph state
// the mode prescribes.
std::vector<GraphEdge> oracle_closure(const SpatialGraph& mst, const SpatialGraph& local, double delta_l,
                                      ClosureMode mode) {
  const std::size_t n = mst.node_count();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : mst.edges()) ++deg[e.i], ++deg[e.j];
  std::vector<GraphEdge> cand;
  for (const auto& e : local.edges())
    if (deg[e.i] == 1 && deg[e.j] == 1 && !mst.has_edge(e.i, e.j)) cand.push_back(e);
  std::sort(cand.begin(), cand.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return std::tie(a.weight, a.i, a.j) < std::tie(b.weight, b.i, b.j);
  });
  const double inf = std::numeric_limits<double>::infinity();
  auto all_pairs = [&](const std::vector<GraphEdge>& edges) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t v = 0; v < n; ++v) d[v][v] = 0;
    for (const auto& e : edges) d[e.i][e.j] = d[e.j][e.i] = std::min(d[e.i][e.j], e.weight);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
  };
  std::vector<GraphEdge> state = mst.edges(), added;
  auto d = all_pairs(state);
  for (const auto& e : cand) {
    if (d[e.i][e.j] <= delta_l) continue;
    added.push_back(e);
    if (mode == ClosureMode::sequential) {
      state.push_back(e);
      d = all_pairs(state);
    }
  }
  return added;
}

TEST(Closure, MatchesOraclesAndInvariants) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Gen g(seed);
    // Noisy rings and arcs produce leaf pairs at varied path lengths.
    std::vector<Eigen::Vector3d> pts;
    const int rings = g.integer(1, 3);
    for (int r = 0; r < rings; ++r) {
      const Eigen::Vector3d c = g.point(0, 0.5);
      const double rad = g.uniform(0.03, 0.12);
      const int n = g.integer(15, 40);
      for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        pts.push_back(c + Eigen::Vector3d(rad * std::cos(a), rad * std::sin(a), g.normal(0.004)));
      }
    }
    const auto local = build_local_graph(pts, g.uniform(0.02, 0.04));
    const auto mst = minimum_spanning_forest(local);
    const double delta = g.uniform(0.02, 0.3);
    for (auto mode : {ClosureMode::snapshot, ClosureMode::sequential}) {
      const auto closed = close_mst_cycles(mst, local, delta, mode);
      const auto want = oracle_closure(mst, local, delta, mode);
      ASSERT_EQ(closed.added, want) << seed;
      ASSERT_EQ(cycle_rank(closed.graph), cycle_rank(mst) + closed.added.size());
      const auto deg = mst.degrees();
      for (const auto& e : closed.added) {
        ASSERT_TRUE(local.has_edge(e.i, e.j));
        ASSERT_EQ(deg[e.i], 1u);
        ASSERT_EQ(deg[e.j], 1u);
      }
      for (const auto& e : mst.edges()) ASSERT_TRUE(closed.graph.has_edge(e.i, e.j));
    }
  }
}

TEST(GraphConfig, Validation) {
  GraphConfig c;
  EXPECT_NO_THROW(c.validate());
  c.r_s = 0.0;
  EXPECT_THROW(c.validate(), InvalidParameter);
}

}  // namespace
}  // namespace vineskel
