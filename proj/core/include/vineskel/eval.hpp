// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/mask.hpp"
#include "vineskel/skeleton.hpp"
#include "vineskel/transform.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace vineskel {

/// Pinhole camera without distortion. `pose` maps world to camera
/// coordinates; the camera looks down +z, image y grows downward.
struct CameraModel {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;
  RigidTransform pose;

  /// Throws InvalidParameter unless fx, fy > 0 and the principal point
  /// lies inside the image.
  void validate() const;
  /// Pixel coordinates of a camera-frame point (z > 0).
  Eigen::Vector2d project_camera(const Eigen::Vector3d& pc) const;
};

/// A segment after projection: pixel-space endpoints and half-widths.
/// Pixel (x, y) is filled when its centre q satisfies
/// |q - c(t)| <= w(t), with t the clamped projection of q onto [a, b],
/// c(t) = a + t (b - a) and w(t) = wa + t (wb - wa).
struct Capsule2d {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
  double wa = 0.0;
  double wb = 0.0;

  bool contains(double x, double y) const;
};

/// Projects every segment; segments entirely at depth <= near are dropped,
/// one endpoint behind is clipped to the near plane. Half-width at an
/// endpoint is radius * fx / depth.
std::vector<Capsule2d> project_capsules(const Skeleton& skeleton, const CameraModel& cam, double near = 1e-3);

Mask project_skeleton(const Skeleton& skeleton, const CameraModel& cam);

struct IoUReport {
  double iou = 1.0;  ///< 1 when both pixel sets are empty
  std::size_t intersection_px = 0;
  std::size_t union_px = 0;
  std::size_t model_only_px = 0;
  std::size_t mask_only_px = 0;
  std::vector<IoUReport> views;  ///< per-view counts (empty for a single view)
};

/// Pixel counts of one view.
IoUReport compare_masks(const Mask& model, const Mask& truth);

/// Sums per-view counts and divides once. Throws ShapeError when the
/// number of cameras and masks differ or a mask does not match its camera.
IoUReport reprojection_iou(const Skeleton& skeleton, const std::vector<CameraModel>& cams,
                           const std::vector<Mask>& masks, int threads = 1);

/// Connected components of segments under endpoint sharing.
std::size_t count_clusters(const Skeleton& skeleton);

}  // namespace vineskel
