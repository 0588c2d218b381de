// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/transform.hpp"

#include "vineskel/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vineskel {

RigidTransform RigidTransform::from_row_major(std::span<const double> m) {
  if (m.size() != 16) throw InvalidParameter("pose must have 16 values, got " + std::to_string(m.size()));
  RigidTransform t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = m[r * 4 + c];
    t.translation[r] = m[r * 4 + 3];
  }
  // Poses written as text lose a few ulps; accept them and re-orthonormalize.
  if (!t.is_valid(1e-6)) throw InvalidParameter("pose rotation block is not a proper rotation");
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(t.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  t.rotation = svd.matrixU() * svd.matrixV().transpose();
  return t;
}

std::array<double, 16> RigidTransform::to_row_major() const {
  std::array<double, 16> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r * 4 + c] = rotation(r, c);
    m[r * 4 + 3] = translation[r];
  }
  m[15] = 1.0;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

double RigidTransform::angle_deg() const {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

bool RigidTransform::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double orth = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidTransform axis_angle(const Eigen::Vector3d& axis, double angle_rad, const Eigen::Vector3d& translation) {
  RigidTransform t;
  t.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
  t.translation = translation;
  return t;
}

}  // namespace vineskel
