// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/register.hpp"

#include "parallel.hpp"
#include "vineskel/error.hpp"
#include "vineskel/spatial_index.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace vineskel {

namespace {

// Relative threshold on the second singular value below which a point set
// (or cross-covariance) is treated as collinear.
constexpr double kRankTol = 1e-10;

bool spans_plane(const std::vector<Eigen::Vector3d>& pts) {
  if (pts.size() < 3) return false;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const auto ev = eig.eigenvalues();  // ascending
  return ev[2] > 0.0 && ev[1] > kRankTol * ev[2];
}

struct Correspondences {
  std::vector<Eigen::Vector3d> from, to;
  double residual = 0.0;
};

Correspondences correspond(const std::vector<Eigen::Vector3d>& source, const SpatialIndex& target,
                           const RigidTransform& t, double max_dist) {
  Correspondences c;
  c.from.reserve(source.size());
  c.to.reserve(source.size());
  const double cap2 = max_dist * max_dist;
  double sum = 0.0;
  for (const auto& x : source) {
    const auto moved = t.apply(x);
    const auto nn = target.nearest(moved);
    const double d2 = nn.distance * nn.distance;
    if (d2 <= cap2) {
      c.from.push_back(x);
      c.to.push_back(target.positions()[nn.index]);
      sum += d2;
    } else {
      sum += cap2;
    }
  }
  c.residual = std::sqrt(sum / static_cast<double>(source.size()));
  return c;
}

}  // namespace

RigidTransform fit_rigid(const std::vector<Eigen::Vector3d>& from, const std::vector<Eigen::Vector3d>& to) {
  if (from.size() != to.size()) throw ShapeError("fit_rigid: correspondence size mismatch");
  if (from.size() < 3) throw AlignmentFailed(0, "fewer than 3 correspondences");

  Eigen::Vector3d mf = Eigen::Vector3d::Zero(), mt = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    mf += from[i];
    mt += to[i];
  }
  mf /= static_cast<double>(from.size());
  mt /= static_cast<double>(to.size());

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) h += (from[i] - mf) * (to[i] - mt).transpose();

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] <= kRankTol * s[0]) throw AlignmentFailed(0, "rank-deficient cross-covariance");

  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;

  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = mt - t.rotation * mf;
  return t;
}

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
                    const IcpParams& params) {
  const auto src = source.positions();
  auto tgt = target.positions();
  if (!spans_plane(src)) throw AlignmentFailed(0, "source has fewer than 3 non-collinear points");
  if (!spans_plane(tgt)) throw AlignmentFailed(0, "target has fewer than 3 non-collinear points");

  const SpatialIndex index(std::move(tgt));
  IcpResult result;
  result.transform = init;
  auto corr = correspond(src, index, init, params.max_correspondence);
  result.residuals.push_back(corr.residual);

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    if (corr.from.size() < 3) throw AlignmentFailed(iter - 1, "fewer than 3 correspondences within range");
    RigidTransform next;
    try {
      next = fit_rigid(corr.from, corr.to);
    } catch (const AlignmentFailed& e) {
      throw AlignmentFailed(iter - 1, "degenerate correspondences");
    }
    auto next_corr = correspond(src, index, next, params.max_correspondence);
    // The truncated objective cannot increase in exact arithmetic; a rise
    // here is rounding noise at convergence.
    if (next_corr.residual > corr.residual) break;
    result.iterations = iter;
    result.transform = next;
    const double change = corr.residual - next_corr.residual;
    corr = std::move(next_corr);
    result.residuals.push_back(corr.residual);
    if (change < params.tol) break;
  }
  return result;
}

RegistrationResult register_scan(const std::vector<Frame>& frames, const IcpParams& params, int threads) {
  if (frames.empty()) throw InvalidParameter("register_scan needs at least one frame");

  auto place = [](const PointCloud& cloud, const RigidTransform& pose) {
    PointCloud out = cloud;
    for (auto& p : out.points) p.position = pose.apply(p.position);
    return out;
  };

  std::vector<std::size_t> horizontal, vertical;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    (frames[i].sequence == Sequence::horizontal ? horizontal : vertical).push_back(i);
  }
  if (horizontal.empty()) {
    horizontal.push_back(vertical.front());
    vertical.erase(vertical.begin());
  }

  RegistrationResult result;
  result.poses.resize(frames.size());
  std::vector<PointCloud> placed(frames.size());

  auto align = [&](std::size_t i, const PointCloud& target) {
    const auto initial = place(frames[i].cloud, frames[i].pose.initial_pose);
    try {
      const auto icp = icp_align(initial, target, RigidTransform::identity(), params);
      result.poses[i] = frames[i].pose;
      result.poses[i].refined_pose = icp.transform * frames[i].pose.initial_pose;
      placed[i] = place(frames[i].cloud, result.poses[i].refined_pose);
    } catch (const AlignmentFailed& e) {
      throw RegistrationError(i, e);
    }
  };

  const auto anchor = horizontal.front();
  result.poses[anchor] = frames[anchor].pose;
  result.poses[anchor].refined_pose = frames[anchor].pose.initial_pose;
  placed[anchor] = place(frames[anchor].cloud, frames[anchor].pose.initial_pose);
  for (std::size_t k = 1; k < horizontal.size(); ++k) align(horizontal[k], placed[horizontal[k - 1]]);

  if (!vertical.empty()) {
    PointCloud combined_h;
    for (auto i : horizontal) {
      combined_h.points.insert(combined_h.points.end(), placed[i].points.begin(), placed[i].points.end());
    }
    detail::parallel_for(vertical.size(), threads, [&](std::size_t k) { align(vertical[k], combined_h); });
  }

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& pose = result.poses[i];
    for (std::size_t j = 0; j < placed[i].size(); ++j) {
      Point p = placed[i].points[j];
      p.camera_id = pose.camera_id;
      if (!p.camera_distance) p.camera_distance = frames[i].cloud.points[j].position.norm();
      result.combined.points.push_back(p);
    }
  }
  return result;
}

PointCloud discard_far_points(const PointCloud& cloud, double overlap_radius, double distance_margin) {
  if (overlap_radius < 0.0 || distance_margin < 0.0) {
    throw InvalidParameter("overlap_radius and distance_margin must be non-negative");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.points[i].camera_distance) {
      throw MissingProvenance("point " + std::to_string(i) + " has no camera_distance");
    }
  }
  const auto index = build_spatial_index(cloud);
  PointCloud out;
  std::vector<std::uint32_t> nbrs;
  for (const auto& p : cloud.points) {
    nbrs.clear();
    index.radius_query(p.position, overlap_radius, nbrs);
    const double limit = *p.camera_distance - distance_margin;
    bool shadowed = false;
    for (auto j : nbrs) {
      if (*cloud.points[j].camera_distance < limit) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) out.points.push_back(p);
  }
  return out;
}

}  // namespace vineskel
