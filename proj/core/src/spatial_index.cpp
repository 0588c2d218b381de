// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vineskel {

namespace {
constexpr std::uint32_t kLeafSize = 12;
}

SpatialIndex::SpatialIndex(std::vector<Eigen::Vector3d> positions) : positions_(std::move(positions)) {
  order_.resize(positions_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!positions_.empty()) {
    nodes_.reserve(2 * positions_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<std::uint32_t>(positions_.size()));
  }
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = positions_[order_[begin]], hi = lo;
  for (auto i = begin; i < end; ++i) {
    lo = lo.cwiseMin(positions_[order_[i]]);
    hi = hi.cwiseMax(positions_[order_[i]]);
  }
  Eigen::Index dim = 0;
  (hi - lo).maxCoeff(&dim);
  if (hi[dim] == lo[dim]) return id;  // all coincident

  const auto mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return positions_[a][dim] < positions_[b][dim]; });
  const double split = positions_[order_[mid]][dim];

  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  auto& node = nodes_[id];
  node.split_dim = static_cast<std::int32_t>(dim);
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void SpatialIndex::radius_rec(std::int32_t id, const Eigen::Vector3d& q, double r2,
                              std::vector<std::uint32_t>& out) const {
  const Node& node = nodes_[id];
  if (node.split_dim < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto idx = order_[i];
      if ((positions_[idx] - q).squaredNorm() <= r2) out.push_back(idx);
    }
    return;
  }
  // Left holds coords <= split, right holds coords >= split.
  const double diff = q[node.split_dim] - node.split;
  if (diff <= 0.0) {
    radius_rec(node.left, q, r2, out);
    if (diff * diff <= r2) radius_rec(node.right, q, r2, out);
  } else {
    radius_rec(node.right, q, r2, out);
    if (diff * diff <= r2) radius_rec(node.left, q, r2, out);
  }
}

void SpatialIndex::radius_query(const Eigen::Vector3d& q, double r, std::vector<std::uint32_t>& out) const {
  if (root_ < 0 || r < 0.0) return;
  radius_rec(root_, q, r * r, out);
}

std::vector<std::uint32_t> SpatialIndex::radius_query(const Eigen::Vector3d& q, double r) const {
  std::vector<std::uint32_t> out;
  radius_query(q, r, out);
  std::sort(out.begin(), out.end());
  return out;
}

void SpatialIndex::nearest_rec(std::int32_t id, const Eigen::Vector3d& q, Neighbor& best,
                               double& best_d2) const {
  const Node& node = nodes_[id];
  if (node.split_dim < 0) {
    for (auto i = node.begin; i < node.end; ++i) {
      const auto idx = order_[i];
      const double d2 = (positions_[idx] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best.index)) {
        best_d2 = d2;
        best.index = idx;
      }
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split;
  const auto near = diff <= 0.0 ? node.left : node.right;
  const auto far = diff <= 0.0 ? node.right : node.left;
  nearest_rec(near, q, best, best_d2);
  if (diff * diff <= best_d2) nearest_rec(far, q, best, best_d2);
}

Neighbor SpatialIndex::nearest(const Eigen::Vector3d& q) const {
  Neighbor best;
  if (root_ < 0) return best;
  double best_d2 = std::numeric_limits<double>::infinity();
  best.index = std::numeric_limits<std::uint32_t>::max();
  nearest_rec(root_, q, best, best_d2);
  best.distance = std::sqrt(best_d2);
  return best;
}

SpatialIndex build_spatial_index(const PointCloud& cloud) { return SpatialIndex(cloud.positions()); }

}  // namespace vineskel
