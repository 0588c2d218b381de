// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace vineskel {

struct Neighbor {
  std::uint32_t index = 0;
  double distance = std::numeric_limits<double>::infinity();
};

/// Exact k-d tree over a fixed set of positions. Immutable after
/// construction, so concurrent queries are safe.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Eigen::Vector3d> positions);

  std::size_t size() const noexcept { return positions_.size(); }
  const std::vector<Eigen::Vector3d>& positions() const noexcept { return positions_; }

  /// All indices i with |p_i - q| <= r, ascending.
  std::vector<std::uint32_t> radius_query(const Eigen::Vector3d& q, double r) const;
  /// Appends to `out` (unsorted); avoids reallocation in hot loops.
  void radius_query(const Eigen::Vector3d& q, double r, std::vector<std::uint32_t>& out) const;

  /// Nearest point; lowest index wins on exact ties. Empty index returns
  /// a Neighbor with infinite distance.
  Neighbor nearest(const Eigen::Vector3d& q) const;

 private:
  struct Node {
    // Leaf when split_dim < 0: covers order_[begin, end).
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    std::int32_t split_dim = -1;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void radius_rec(std::int32_t node, const Eigen::Vector3d& q, double r2,
                  std::vector<std::uint32_t>& out) const;
  void nearest_rec(std::int32_t node, const Eigen::Vector3d& q, Neighbor& best, double& best_d2) const;

  std::vector<Eigen::Vector3d> positions_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

SpatialIndex build_spatial_index(const PointCloud& cloud);

}  // namespace vineskel
