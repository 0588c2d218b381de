// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"
#include "vineskel/transform.hpp"

#include <cstdint>
#include <vector>

namespace vineskel {

struct IcpParams {
  int max_iters = 50;
  /// Stop when the residual changes by less than this (meters).
  double tol = 1e-6;
  /// Correspondences farther than this are ignored (meters).
  double max_correspondence = 0.05;
};

struct IcpResult {
  RigidTransform transform;
  /// Residual before the first update and after every accepted update. It
  /// is the RMS of correspondence distances truncated at
  /// max_correspondence, which makes the sequence non-increasing.
  std::vector<double> residuals;
  int iterations = 0;
};

/// Point-to-point ICP. The returned transform maps `source` into the frame
/// of `target`. Throws AlignmentFailed on degenerate geometry.
IcpResult icp_align(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
                    const IcpParams& params = {});

/// Least-squares rigid motion taking `from[i]` onto `to[i]`, with reflection
/// correction. Throws AlignmentFailed (iterations 0) when fewer than 3
/// pairs or when the pairs are collinear.
RigidTransform fit_rigid(const std::vector<Eigen::Vector3d>& from, const std::vector<Eigen::Vector3d>& to);

enum class Sequence { horizontal, vertical };

struct FramePose {
  std::uint8_t camera_id = 0;
  /// Camera-to-world placement from robot extrinsics.
  RigidTransform initial_pose;
  RigidTransform refined_pose;
};

/// One stereo frame. Points are in the camera frame.
struct Frame {
  PointCloud cloud;
  FramePose pose;
  Sequence sequence = Sequence::horizontal;
};

struct RegistrationResult {
  PointCloud combined;
  std::vector<FramePose> poses;
};

/// Chains the horizontal frames pairwise in input order, then aligns every
/// vertical frame to the combined horizontal cloud. Points keep their
/// camera id and get camera_distance (distance to the camera centre) when
/// missing. Throws RegistrationError naming the frame.
RegistrationResult register_scan(const std::vector<Frame>& frames, const IcpParams& params = {},
                                 int threads = 1);

/// Drops every point that has a neighbour within `overlap_radius` seen from
/// a camera more than `distance_margin` closer. Throws MissingProvenance
/// when a point lacks camera_distance.
PointCloud discard_far_points(const PointCloud& cloud, double overlap_radius = 0.02,
                              double distance_margin = 0.25);

}  // namespace vineskel
