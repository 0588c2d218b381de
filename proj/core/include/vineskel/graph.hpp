// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace vineskel {

using NodeId = std::uint32_t;

struct GraphEdge {
  NodeId i = 0;  // i < j after normalisation
  NodeId j = 0;
  double weight = 0.0;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Undirected weighted graph over point positions. Edges are kept
/// normalised (i < j) and sorted by (i, j); self loops and duplicates are
/// rejected at construction.
class SpatialGraph {
 public:
  SpatialGraph() = default;
  explicit SpatialGraph(std::vector<Eigen::Vector3d> positions, std::vector<GraphEdge> edges = {});

  std::size_t node_count() const noexcept { return positions_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Eigen::Vector3d>& positions() const noexcept { return positions_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }

  bool has_edge(NodeId a, NodeId b) const;
  std::vector<std::size_t> degrees() const;
  /// Neighbour lists (node, weight), ascending by node.
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency() const;
  double total_weight() const;

  /// Copy with the same nodes and additional edges.
  SpatialGraph with_edges(const std::vector<GraphEdge>& extra) const;

 private:
  std::vector<Eigen::Vector3d> positions_;
  std::vector<GraphEdge> edges_;
};

struct GraphConfig {
  double r_s = 0.03;      ///< neighbourhood sphere radius (m)
  double delta_l = 0.25;  ///< minimum MST path length between leaves for loop closing (m)
  double delta_b = 0.05;  ///< barb length threshold (m)
  void validate() const;
};

/// Edge (i, j) iff 0 < |p_i - p_j| <= r_s.
SpatialGraph build_local_graph(const PointCloud& cloud, double r_s);
SpatialGraph build_local_graph(std::vector<Eigen::Vector3d> positions, double r_s);

using Cluster = std::vector<NodeId>;

/// Maximal connected components, each sorted ascending, ordered by
/// descending size then lowest node index.
std::vector<Cluster> connected_clusters(const SpatialGraph& graph);

/// Number of independent cycles: E - V + C.
std::size_t cycle_rank(const SpatialGraph& graph);

/// Kruskal minimum spanning tree of one connected cluster, ties broken by
/// (weight, min index, max index). The result keeps every node of `graph`
/// but only the tree edges. Throws InvalidCluster if the cluster is not
/// connected in `graph`.
SpatialGraph kruskal_mst(const SpatialGraph& graph, const Cluster& cluster);

/// Kruskal over every cluster at once.
SpatialGraph minimum_spanning_forest(const SpatialGraph& graph);

struct ClosureResult {
  SpatialGraph graph;
  std::vector<GraphEdge> added;  // in processing order
};

enum class ClosureMode {
  /// Candidates in ascending (weight, min index, max index) order; each is
  /// tested against the forest plus the edges already added, so once a
  /// break is closed the parallel leaf pairs around it are short paths.
  sequential,
  /// Every candidate is tested against the input forest only.
  snapshot,
};

/// Re-adds local-graph edges that join two MST leaves whose graph distance
/// exceeds delta_l (summed edge lengths).
ClosureResult close_mst_cycles(const SpatialGraph& mst, const SpatialGraph& local, double delta_l,
                               ClosureMode mode = ClosureMode::sequential);

}  // namespace vineskel
