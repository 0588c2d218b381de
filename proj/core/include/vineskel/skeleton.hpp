// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace vineskel {

/// Line segment between two shared endpoints.
struct Segment {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double radius = 0.0;        ///< meters; 0 until radii are estimated
  std::int32_t edge_id = -1;  ///< topology edge the segment traces
  std::int32_t cluster_id = 0;
};

/// Line segments with radii. Connectivity is carried by endpoint sharing:
/// segments that meet reference the same endpoint index.
struct Skeleton {
  std::vector<Eigen::Vector3d> endpoints;
  std::vector<Segment> segments;

  bool empty() const noexcept { return segments.empty(); }
  double segment_length(std::size_t s) const { return (endpoints[segments[s].b] - endpoints[segments[s].a]).norm(); }
  double total_length() const;
  /// Appends `other`, offsetting its endpoint indices.
  void append(const Skeleton& other);
};

/// Squared distance from p to the closed segment [a, b] and the clamped
/// projection parameter.
struct SegmentProjection {
  double t = 0.0;
  double distance2 = 0.0;
};
SegmentProjection project_to_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

}  // namespace vineskel
