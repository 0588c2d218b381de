// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/eval.hpp"

#include "parallel.hpp"
#include "vineskel/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vineskel {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidParameter("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidParameter("camera image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw InvalidParameter("camera principal point lies outside the image");
}

Eigen::Vector2d CameraModel::project_camera(const Eigen::Vector3d& pc) const {
  return {fx * pc.x() / pc.z() + cx, fy * pc.y() / pc.z() + cy};
}

bool Capsule2d::contains(double x, double y) const {
  const Eigen::Vector2d q(x, y);
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((q - a).dot(d) / len2, 0.0, 1.0);
  const Eigen::Vector2d c = a + t * d;
  const double w = wa + t * (wb - wa);
  return (q - c).squaredNorm() <= w * w;
}

std::vector<Capsule2d> project_capsules(const Skeleton& skeleton, const CameraModel& cam, double near) {
  std::vector<Capsule2d> out;
  out.reserve(skeleton.segments.size());
  for (const Segment& seg : skeleton.segments) {
    Eigen::Vector3d pa = cam.pose.apply(skeleton.endpoints[seg.a]);
    Eigen::Vector3d pb = cam.pose.apply(skeleton.endpoints[seg.b]);
    if (pa.z() <= near && pb.z() <= near) continue;
    if (pa.z() < near) pa = pb + (pa - pb) * ((pb.z() - near) / (pb.z() - pa.z()));
    if (pb.z() < near) pb = pa + (pb - pa) * ((pa.z() - near) / (pa.z() - pb.z()));
    Capsule2d c;
    c.a = cam.project_camera(pa);
    c.b = cam.project_camera(pb);
    c.wa = seg.radius * cam.fx / pa.z();
    c.wb = seg.radius * cam.fx / pb.z();
    out.push_back(c);
  }
  return out;
}

Mask project_skeleton(const Skeleton& skeleton, const CameraModel& cam) {
  cam.validate();
  Mask mask(cam.width, cam.height);
  for (const Capsule2d& c : project_capsules(skeleton, cam)) {
    const double w = std::max(c.wa, c.wb);
    const double x0 = std::min(c.a.x(), c.b.x()) - w, x1 = std::max(c.a.x(), c.b.x()) + w;
    const double y0 = std::min(c.a.y(), c.b.y()) - w, y1 = std::max(c.a.y(), c.b.y()) + w;
    if (!(x1 >= 0.0 && y1 >= 0.0 && x0 <= cam.width - 1 && y0 <= cam.height - 1)) continue;
    const int xa = std::max(0, static_cast<int>(std::floor(x0)));
    const int xb = std::min(cam.width - 1, static_cast<int>(std::ceil(x1)));
    const int ya = std::max(0, static_cast<int>(std::floor(y0)));
    const int yb = std::min(cam.height - 1, static_cast<int>(std::ceil(y1)));
    for (int y = ya; y <= yb; ++y)
      for (int x = xa; x <= xb; ++x)
        if (!mask.get(x, y) && c.contains(x, y)) mask.set(x, y);
  }
  return mask;
}

namespace {

void finish(IoUReport& r) {
  r.iou = r.union_px == 0 ? 1.0 : static_cast<double>(r.intersection_px) / static_cast<double>(r.union_px);
}

}  // namespace

IoUReport compare_masks(const Mask& model, const Mask& truth) {
  if (!model.same_shape(truth)) throw ShapeError("mask dimensions differ");
  IoUReport r;
  const auto& a = model.bits();
  const auto& b = truth.bits();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++r.intersection_px;
    else if (a[i]) ++r.model_only_px;
    else if (b[i]) ++r.mask_only_px;
  }
  r.union_px = r.intersection_px + r.model_only_px + r.mask_only_px;
  finish(r);
  return r;
}

IoUReport reprojection_iou(const Skeleton& skeleton, const std::vector<CameraModel>& cams,
                           const std::vector<Mask>& masks, int threads) {
  if (cams.size() != masks.size()) throw ShapeError("number of cameras and masks differ");
  for (std::size_t v = 0; v < cams.size(); ++v)
    if (masks[v].width() != cams[v].width || masks[v].height() != cams[v].height)
      throw ShapeError("mask " + std::to_string(v) + " does not match its camera size");

  std::vector<IoUReport> views(cams.size());
  detail::parallel_for(cams.size(), threads,
                       [&](std::size_t v) { views[v] = compare_masks(project_skeleton(skeleton, cams[v]), masks[v]); });
  IoUReport total;
  for (const auto& v : views) {
    total.intersection_px += v.intersection_px;
    total.model_only_px += v.model_only_px;
    total.mask_only_px += v.mask_only_px;
  }
  total.union_px = total.intersection_px + total.model_only_px + total.mask_only_px;
  finish(total);
  total.views = std::move(views);
  return total;
}

std::size_t count_clusters(const Skeleton& skeleton) {
  std::vector<std::uint32_t> parent(skeleton.endpoints.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Segment& s : skeleton.segments) {
    const auto ra = find(s.a), rb = find(s.b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::uint32_t> roots;
  for (const Segment& s : skeleton.segments) roots.push_back(find(s.a));
  std::sort(roots.begin(), roots.end());
  return static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

}  // namespace vineskel
