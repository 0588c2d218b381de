// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <span>

namespace vineskel {

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }
  /// From 16 row-major values of a 4x4 homogeneous matrix. The last row is
  /// ignored; the rotation block is validated (InvalidParameter).
  static RigidTransform from_row_major(std::span<const double> m);
  std::array<double, 16> to_row_major() const;

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (*this) after `rhs`: x -> this(rhs(x)).
  RigidTransform operator*(const RigidTransform& rhs) const;

  /// Rotation angle of this transform in degrees.
  double angle_deg() const;
  bool is_valid(double tol = 1e-9) const;
};

RigidTransform axis_angle(const Eigen::Vector3d& axis, double angle_rad, const Eigen::Vector3d& translation);

}  // namespace vineskel
