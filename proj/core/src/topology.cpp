// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/topology.hpp"

#include "vineskel/error.hpp"
#include "vineskel/spatial_index.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace vineskel {

DirectedGraph::DirectedGraph(std::vector<Eigen::Vector3d> positions, NodeId root)
    : positions_(std::move(positions)),
      present_(positions_.size(), 0),
      parents_(positions_.size()),
      children_(positions_.size()),
      root_(root) {}

std::vector<NodeId> DirectedGraph::nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < present_.size(); ++v) {
    if (present_[v]) out.push_back(v);
  }
  return out;
}

std::size_t DirectedGraph::node_count() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

std::size_t DirectedGraph::edge_count() const {
  std::size_t e = 0;
  for (const auto& c : children_) e += c.size();
  return e;
}

void DirectedGraph::add_node(NodeId v) { present_[v] = 1; }

void DirectedGraph::add_edge(NodeId from, NodeId to) {
  children_[from].push_back(to);
  parents_[to].push_back(from);
}

void DirectedGraph::remove_node(NodeId v) {
  auto erase = [](std::vector<NodeId>& list, NodeId x) { list.erase(std::remove(list.begin(), list.end(), x), list.end()); };
  for (auto p : parents_[v]) erase(children_[p], v);
  for (auto c : children_[v]) erase(parents_[c], v);
  parents_[v].clear();
  children_[v].clear();
  present_[v] = 0;
}

SpatialGraph DirectedGraph::undirected() const {
  std::vector<GraphEdge> edges;
  for (NodeId v = 0; v < children_.size(); ++v) {
    for (auto c : children_[v]) edges.push_back({v, c, length(v, c)});
  }
  return SpatialGraph(positions_, std::move(edges));
}

NodeId select_root(const SpatialGraph& graph, const Cluster& cluster, const RootSelection& selection) {
  if (cluster.empty()) throw InvalidParameter("cannot select a root in an empty cluster");
  if (selection.strategy == RootStrategy::index &&
      std::binary_search(cluster.begin(), cluster.end(), selection.index)) {
    return selection.index;
  }
  if (selection.strategy == RootStrategy::max_degree) {
    const auto deg = graph.degrees();
    NodeId best = cluster.front();
    for (auto v : cluster) {
      if (deg[v] > deg[best]) best = v;
    }
    return best;
  }
  NodeId best = cluster.front();
  for (auto v : cluster) {
    if (graph.positions()[v].z() < graph.positions()[best].z()) best = v;
  }
  return best;
}

DirectedGraph orient_from_root(const SpatialGraph& graph, NodeId root) {
  if (root >= graph.node_count()) throw InvalidParameter("root " + std::to_string(root) + " is not in the graph");
  const auto adj = graph.adjacency();
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> order(graph.node_count(), kUnseen);

  std::vector<NodeId> level{root}, next;
  std::vector<NodeId> sequence;
  order[root] = 0;
  while (!level.empty()) {
    std::sort(level.begin(), level.end());
    next.clear();
    for (auto v : level) {
      order[v] = sequence.size();
      sequence.push_back(v);
    }
    for (auto v : level) {
      for (const auto& [w, len] : adj[v]) {
        if (order[w] == kUnseen) {
          order[w] = kUnseen - 1;  // queued
          next.push_back(w);
        }
      }
    }
    std::swap(level, next);
  }

  DirectedGraph out(graph.positions(), root);
  for (auto v : sequence) out.add_node(v);
  for (auto v : sequence) {
    for (const auto& [w, len] : adj[v]) {
      if (order[v] < order[w]) out.add_edge(v, w);
    }
  }
  return out;
}

std::vector<NodeId> detect_loop_points(const DirectedGraph& graph) {
  std::vector<NodeId> out;
  for (auto v : graph.nodes()) {
    if (graph.parents(v).size() >= 2) out.push_back(v);
  }
  return out;
}

DirectedGraph remove_barbs(const DirectedGraph& graph, double delta_b) {
  if (!(delta_b > 0.0)) throw InvalidParameter("delta_b must be positive");
  DirectedGraph g = graph;
  std::vector<NodeId> doomed;
  for (;;) {
    doomed.clear();
    for (auto leaf : g.nodes()) {
      if (leaf == g.root() || !g.children(leaf).empty() || g.parents(leaf).size() != 1) continue;
      std::vector<NodeId> chain{leaf};
      double length = 0.0;
      NodeId cur = leaf;
      bool anchored_at_loop = false;
      for (;;) {
        const NodeId p = g.parents(cur).front();
        length += g.length(cur, p);
        if (g.parents(p).size() >= 2) {
          anchored_at_loop = true;
          break;
        }
        if (p == g.root() || g.children(p).size() != 1) break;
        chain.push_back(p);
        cur = p;
        if (length >= delta_b) break;
      }
      if (!anchored_at_loop && length < delta_b) doomed.insert(doomed.end(), chain.begin(), chain.end());
    }
    if (doomed.empty()) break;
    for (auto v : doomed) g.remove_node(v);
  }
  return g;
}

double TopoEdge::length(const std::vector<Eigen::Vector3d>& positions) const {
  double l = 0.0;
  for (std::size_t k = 1; k < chain.size(); ++k) l += (positions[chain[k]] - positions[chain[k - 1]]).norm();
  return l;
}

std::size_t TopologyGraph::cycle_rank() const {
  // Union-find over topology node ids.
  std::vector<NodeId> ids;
  for (const auto& n : nodes) ids.push_back(n.id);
  std::vector<std::size_t> parent(ids.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto slot = [&](NodeId id) { return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin()); };
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = ids.size();
  for (const auto& e : edges) {
    const auto a = find(slot(e.chain.front())), b = find(slot(e.chain.back()));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return edges.size() + components - ids.size();
}

double TopologyGraph::total_length() const {
  double l = 0.0;
  for (const auto& e : edges) l += e.length(positions);
  return l;
}

std::string_view kind_name(TopoNodeKind kind) {
  switch (kind) {
    case TopoNodeKind::junction: return "junction";
    case TopoNodeKind::leaf: return "leaf";
    case TopoNodeKind::loop: return "loop";
  }
  return "unknown";
}

TopologyGraph extract_topology(const DirectedGraph& graph) {
  TopologyGraph topo;
  topo.positions = graph.positions();

  const auto nodes = graph.nodes();
  std::vector<std::uint8_t> is_topo(graph.positions().size(), 0);
  for (auto v : nodes) {
    const bool keep = graph.degree(v) != 2 || v == graph.root() || graph.parents(v).size() >= 3;
    if (!keep) continue;
    is_topo[v] = 1;
    TopoNode n{v, TopoNodeKind::leaf};
    if (graph.parents(v).size() >= 2) {
      n.kind = TopoNodeKind::loop;
    } else if (graph.degree(v) >= 2) {
      n.kind = TopoNodeKind::junction;
    }
    if (graph.parents(v).size() >= 3) {
      topo.warnings.push_back("loop point " + std::to_string(v) + " has " + std::to_string(graph.parents(v).size()) +
                              " incoming edges; kept as a junction");
    }
    topo.nodes.push_back(n);
  }

  auto neighbours = [&](NodeId v) {
    std::vector<NodeId> out = graph.parents(v);
    out.insert(out.end(), graph.children(v).begin(), graph.children(v).end());
    std::sort(out.begin(), out.end());
    return out;
  };
  auto key = [](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  auto forward = [&](NodeId a, NodeId b) {
    const auto& c = graph.children(a);
    return std::find(c.begin(), c.end(), b) != c.end();
  };

  std::unordered_set<std::uint64_t> used;
  for (const auto& tn : topo.nodes) {
    for (auto first : neighbours(tn.id)) {
      if (used.count(key(tn.id, first))) continue;
      TopoEdge edge;
      edge.chain = {tn.id, first};
      used.insert(key(tn.id, first));
      NodeId prev = tn.id, cur = first;
      while (!is_topo[cur]) {
        const auto nb = neighbours(cur);
        const NodeId next = nb[0] == prev ? nb[1] : nb[0];
        used.insert(key(cur, next));
        edge.chain.push_back(next);
        prev = cur;
        cur = next;
      }

      // Orient the chain along the directed edges. A dissolved loop point
      // is the one place where directions flip; the longer half keeps its
      // direction and the shorter half is reversed.
      const auto& ch = edge.chain;
      std::size_t sink = ch.size();
      bool all_forward = true, all_backward = true;
      for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
        const bool f = forward(ch[k], ch[k + 1]);
        all_forward &= f;
        all_backward &= !f;
        if (k > 0 && sink == ch.size() && forward(ch[k - 1], ch[k]) && !f) sink = k;
      }
      if (all_backward) {
        std::reverse(edge.chain.begin(), edge.chain.end());
      } else if (!all_forward && sink < ch.size()) {
        double head = 0.0, tail = 0.0;
        for (std::size_t k = 0; k < sink; ++k) head += graph.length(ch[k], ch[k + 1]);
        for (std::size_t k = sink; k + 1 < ch.size(); ++k) tail += graph.length(ch[k], ch[k + 1]);
        if (head < tail) std::reverse(edge.chain.begin(), edge.chain.end());
      }
      topo.edges.push_back(std::move(edge));
    }
  }
  return topo;
}

std::vector<std::int32_t> associate_points(const std::vector<Eigen::Vector3d>& points, const TopologyGraph& topo) {
  std::vector<std::int32_t> out(points.size(), -1);
  if (topo.edges.empty()) return out;

  // Chain node -> lowest edge index containing it.
  std::vector<NodeId> chain_nodes;
  std::vector<std::int32_t> owner(topo.positions.size(), -1);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    for (auto v : topo.edges[e].chain) {
      if (owner[v] < 0) {
        owner[v] = static_cast<std::int32_t>(e);
        chain_nodes.push_back(v);
      }
    }
  }
  std::vector<Eigen::Vector3d> pos;
  pos.reserve(chain_nodes.size());
  for (auto v : chain_nodes) pos.push_back(topo.positions[v]);
  const SpatialIndex index(std::move(pos));

  std::vector<std::uint32_t> ties;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nn = index.nearest(points[i]);
    const double best2 = (index.positions()[nn.index] - points[i]).squaredNorm();
    ties.clear();
    index.radius_query(points[i], nn.distance * (1.0 + 1e-12) + 1e-300, ties);
    std::int32_t edge = owner[chain_nodes[nn.index]];
    for (auto t : ties) {
      if ((index.positions()[t] - points[i]).squaredNorm() == best2) edge = std::min(edge, owner[chain_nodes[t]]);
    }
    out[i] = edge;
  }
  return out;
}

}  // namespace vineskel
