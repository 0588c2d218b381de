// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace vineskel {

/// Orientation of one connected cluster away from a root. Node ids index
/// the positions of the graph it came from; nodes outside the cluster (or
/// deleted later) are marked absent.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(std::vector<Eigen::Vector3d> positions, NodeId root);

  const std::vector<Eigen::Vector3d>& positions() const noexcept { return positions_; }
  NodeId root() const noexcept { return root_; }
  bool contains(NodeId v) const { return v < present_.size() && present_[v] != 0; }
  std::vector<NodeId> nodes() const;
  std::size_t node_count() const;
  std::size_t edge_count() const;

  const std::vector<NodeId>& parents(NodeId v) const { return parents_[v]; }
  const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
  std::size_t degree(NodeId v) const { return parents_[v].size() + children_[v].size(); }
  double length(NodeId a, NodeId b) const { return (positions_[a] - positions_[b]).norm(); }

  void add_node(NodeId v);
  void add_edge(NodeId from, NodeId to);
  /// Removes the node and every incident edge.
  void remove_node(NodeId v);

  /// Undirected view with the same node ids.
  SpatialGraph undirected() const;

 private:
  std::vector<Eigen::Vector3d> positions_;
  std::vector<std::uint8_t> present_;
  std::vector<std::vector<NodeId>> parents_, children_;
  NodeId root_ = 0;
};

enum class RootStrategy { min_z, max_degree, index };

struct RootSelection {
  RootStrategy strategy = RootStrategy::min_z;
  NodeId index = 0;  ///< used with RootStrategy::index; falls back to min_z outside the cluster
};

/// Root for one cluster; ties go to the lowest node index.
NodeId select_root(const SpatialGraph& graph, const Cluster& cluster, const RootSelection& selection = {});

/// Breadth-first orientation of the root's component. The frontier is
/// expanded in ascending node order; every edge points from the node
/// discovered first to the one discovered later, so each independent cycle
/// adds exactly one surplus incoming edge. Throws InvalidParameter when the
/// root is not a node of the graph.
DirectedGraph orient_from_root(const SpatialGraph& graph, NodeId root);

/// Nodes with two or more incoming edges, ascending.
std::vector<NodeId> detect_loop_points(const DirectedGraph& graph);

/// Repeatedly deletes every leaf-terminated chain shorter than delta_b,
/// all qualifying chains of a pass at once, until nothing changes. Chains
/// stop at junctions, loop points and the root; chains that end at a loop
/// point are kept so loop points never lose an edge.
DirectedGraph remove_barbs(const DirectedGraph& graph, double delta_b);

enum class TopoNodeKind { junction, leaf, loop };

struct TopoNode {
  NodeId id = 0;
  TopoNodeKind kind = TopoNodeKind::leaf;
};

/// One non-branching stretch: chain.front() and chain.back() are topology
/// nodes, every interior node has degree 2. A closed loop has front == back.
struct TopoEdge {
  std::vector<NodeId> chain;
  double length(const std::vector<Eigen::Vector3d>& positions) const;
};

struct TopologyGraph {
  std::vector<Eigen::Vector3d> positions;
  std::vector<TopoNode> nodes;  // ascending id
  std::vector<TopoEdge> edges;
  std::vector<std::string> warnings;

  bool empty() const noexcept { return edges.empty(); }
  /// E - V + C over topology nodes and edges.
  std::size_t cycle_rank() const;
  double total_length() const;
};

/// Collapses degree-2 nodes into chains. A loop point with exactly two
/// incoming edges and no children is dissolved; the shorter of the two
/// halves meeting there is reversed so the chain runs continuously from one
/// topology node to the other. Loop points with three or more incoming
/// edges stay as nodes and add a warning.
TopologyGraph extract_topology(const DirectedGraph& graph);

std::string_view kind_name(TopoNodeKind kind);

/// For each point: index of the topology edge containing its nearest chain
/// node, lowest edge index on ties; -1 when the topology has no edges.
std::vector<std::int32_t> associate_points(const std::vector<Eigen::Vector3d>& points, const TopologyGraph& topo);

}  // namespace vineskel
