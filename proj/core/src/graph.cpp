// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/graph.hpp"

#include "vineskel/error.hpp"
#include "vineskel/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

namespace vineskel {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0u); }

  NodeId find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::uint8_t> rank_;
};

bool edge_order(const GraphEdge& a, const GraphEdge& b) {
  if (a.weight != b.weight) return a.weight < b.weight;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

}  // namespace

SpatialGraph::SpatialGraph(std::vector<Eigen::Vector3d> positions, std::vector<GraphEdge> edges)
    : positions_(std::move(positions)), edges_(std::move(edges)) {
  const auto n = positions_.size();
  for (auto& e : edges_) {
    if (e.i == e.j) throw InvalidParameter("self loop on node " + std::to_string(e.i));
    if (e.i >= n || e.j >= n) throw InvalidParameter("edge references a missing node");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw InvalidParameter("duplicate edge (" + std::to_string(edges_[k].i) + ", " + std::to_string(edges_[k].j) + ")");
    }
  }
}

bool SpatialGraph::has_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), GraphEdge{a, b, 0.0},
                                   [](const GraphEdge& x, const GraphEdge& y) {
                                     return x.i != y.i ? x.i < y.i : x.j < y.j;
                                   });
  return it != edges_.end() && it->i == a && it->j == b;
}

std::vector<std::size_t> SpatialGraph::degrees() const {
  std::vector<std::size_t> deg(positions_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<std::vector<std::pair<NodeId, double>>> SpatialGraph::adjacency() const {
  std::vector<std::vector<std::pair<NodeId, double>>> adj(positions_.size());
  for (const auto& e : edges_) {
    adj[e.i].push_back({e.j, e.weight});
    adj[e.j].push_back({e.i, e.weight});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

double SpatialGraph::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges_) w += e.weight;
  return w;
}

SpatialGraph SpatialGraph::with_edges(const std::vector<GraphEdge>& extra) const {
  auto edges = edges_;
  edges.insert(edges.end(), extra.begin(), extra.end());
  return SpatialGraph(positions_, std::move(edges));
}

void GraphConfig::validate() const {
  if (!(r_s > 0.0)) throw InvalidParameter("r_s must be positive");
  if (!(delta_l > 0.0)) throw InvalidParameter("delta_l must be positive");
  if (!(delta_b > 0.0)) throw InvalidParameter("delta_b must be positive");
}

SpatialGraph build_local_graph(std::vector<Eigen::Vector3d> positions, double r_s) {
  if (!(r_s > 0.0)) throw InvalidParameter("r_s must be positive");
  const SpatialIndex index(positions);
  std::vector<GraphEdge> edges;
  std::vector<std::uint32_t> nbrs;
  for (NodeId i = 0; i < positions.size(); ++i) {
    nbrs.clear();
    index.radius_query(positions[i], r_s, nbrs);
    std::sort(nbrs.begin(), nbrs.end());
    for (auto j : nbrs) {
      if (j <= i) continue;
      const double d = (positions[i] - positions[j]).norm();
      if (d > 0.0) edges.push_back({i, j, d});
    }
  }
  return SpatialGraph(std::move(positions), std::move(edges));
}

SpatialGraph build_local_graph(const PointCloud& cloud, double r_s) {
  return build_local_graph(cloud.positions(), r_s);
}

std::vector<Cluster> connected_clusters(const SpatialGraph& graph) {
  const auto n = graph.node_count();
  DisjointSets sets(n);
  for (const auto& e : graph.edges()) sets.unite(e.i, e.j);
  std::unordered_map<NodeId, std::size_t> slot;
  std::vector<Cluster> clusters;
  for (NodeId v = 0; v < n; ++v) {
    const auto r = sets.find(v);
    auto [it, inserted] = slot.try_emplace(r, clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].push_back(v);  // ascending by construction
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return clusters;
}

std::size_t cycle_rank(const SpatialGraph& graph) {
  const auto c = connected_clusters(graph).size();
  return graph.edge_count() + c - graph.node_count();
}

namespace {

std::vector<GraphEdge> kruskal(const SpatialGraph& graph, std::vector<GraphEdge> candidates) {
  std::sort(candidates.begin(), candidates.end(), edge_order);
  DisjointSets sets(graph.node_count());
  std::vector<GraphEdge> tree;
  for (const auto& e : candidates) {
    if (sets.unite(e.i, e.j)) tree.push_back(e);
  }
  return tree;
}

}  // namespace

SpatialGraph kruskal_mst(const SpatialGraph& graph, const Cluster& cluster) {
  std::vector<std::uint8_t> member(graph.node_count(), 0);
  for (auto v : cluster) {
    if (v >= graph.node_count()) throw InvalidCluster("cluster references a missing node");
    member[v] = 1;
  }
  std::vector<GraphEdge> candidates;
  for (const auto& e : graph.edges()) {
    if (member[e.i] && member[e.j]) candidates.push_back(e);
  }
  auto tree = kruskal(graph, std::move(candidates));
  if (!cluster.empty() && tree.size() != cluster.size() - 1) {
    throw InvalidCluster("cluster of " + std::to_string(cluster.size()) + " nodes is not connected (" +
                         std::to_string(tree.size()) + " tree edges)");
  }
  return SpatialGraph(graph.positions(), std::move(tree));
}

SpatialGraph minimum_spanning_forest(const SpatialGraph& graph) {
  return SpatialGraph(graph.positions(), kruskal(graph, graph.edges()));
}

ClosureResult close_mst_cycles(const SpatialGraph& mst, const SpatialGraph& local, double delta_l, ClosureMode mode) {
  if (mst.node_count() != local.node_count()) throw InvalidParameter("mst and local graph differ in node count");
  const auto deg = mst.degrees();
  auto adj = mst.adjacency();

  std::vector<NodeId> component(mst.node_count());
  {
    const auto clusters = connected_clusters(mst);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (auto v : clusters[c]) component[v] = static_cast<NodeId>(c);
    }
  }

  std::vector<GraphEdge> candidates;
  for (const auto& e : local.edges()) {
    if (deg[e.i] == 1 && deg[e.j] == 1 && !mst.has_edge(e.i, e.j) && component[e.i] == component[e.j]) {
      candidates.push_back(e);
    }
  }
  std::sort(candidates.begin(), candidates.end(), edge_order);

  // Bounded Dijkstra: true when no path from `from` to `to` is <= limit.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(mst.node_count(), inf);
  std::vector<NodeId> touched;
  using Item = std::pair<double, NodeId>;
  auto distance_exceeds = [&](NodeId from, NodeId to, double limit) {
    for (auto v : touched) dist[v] = inf;
    touched.clear();
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[from] = 0.0;
    touched.push_back(from);
    queue.emplace(0.0, from);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > dist[v]) continue;
      if (v == to) return false;
      for (const auto& [w, len] : adj[v]) {
        const double nd = d + len;
        if (nd > limit || nd >= dist[w]) continue;
        if (dist[w] == inf) touched.push_back(w);
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
    return true;
  };

  ClosureResult result;
  for (const auto& e : candidates) {
    if (!distance_exceeds(e.i, e.j, delta_l)) continue;
    result.added.push_back(e);
    if (mode == ClosureMode::sequential) {
      adj[e.i].emplace_back(e.j, e.weight);
      adj[e.j].emplace_back(e.i, e.weight);
    }
  }
  result.graph = mst.with_edges(result.added);
  return result;
}

}  // namespace vineskel
