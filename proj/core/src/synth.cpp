// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/synth.hpp"

#include "vineskel/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace vineskel {

void VineSpec::validate() const {
  if (n_canes < 0) throw SpecError("n_canes must be non-negative");
  if (!(cane_length_min > 0.0 && cane_length_max >= cane_length_min)) throw SpecError("invalid cane length range");
  if (!(radius_min > 0.0 && radius_max >= radius_min)) throw SpecError("invalid radius range");
  if (!(cordon_radius > 0.0)) throw SpecError("cordon_radius must be positive");
  if (!(curvature >= 0.0)) throw SpecError("curvature must be non-negative");
  if (loop_count < 0 || barb_count < 0) throw SpecError("loop_count and barb_count must be non-negative");
  if (loop_count > n_canes / 2)
    throw SpecError("loop_count " + std::to_string(loop_count) + " needs " + std::to_string(2 * loop_count) +
                    " canes, have " + std::to_string(n_canes));
  if (!(barb_length_max > 0.0)) throw SpecError("barb_length_max must be positive");
  if (!(noise_sigma >= 0.0)) throw SpecError("noise_sigma must be non-negative");
  if (!(points_per_meter > 0.0)) throw SpecError("points_per_meter must be positive");
  if (!(cordon_length > 0.0)) throw SpecError("cordon_length must be positive");
  if (!(clearance >= 0.0)) throw SpecError("clearance must be non-negative");
  if (n_cameras < 0) throw SpecError("n_cameras must be non-negative");
  if (!(camera_distance > 0.0)) throw SpecError("camera_distance must be positive");
}

namespace {

using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

constexpr double kVertexSpacing = 0.01;

double uniform(Rng& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

std::vector<Vec3> catmull_rom(const std::vector<Vec3>& ctrl, int per_span) {
  std::vector<Vec3> p;
  p.push_back(2.0 * ctrl[0] - ctrl[1]);
  p.insert(p.end(), ctrl.begin(), ctrl.end());
  p.push_back(2.0 * ctrl.back() - ctrl[ctrl.size() - 2]);
  std::vector<Vec3> out;
  for (std::size_t i = 1; i + 2 < p.size(); ++i) {
    for (int k = 0; k < per_span; ++k) {
      const double t = static_cast<double>(k) / per_span;
      const double t2 = t * t, t3 = t2 * t;
      out.push_back(0.5 * ((2.0 * p[i]) + (-p[i - 1] + p[i + 1]) * t +
                           (2.0 * p[i - 1] - 5.0 * p[i] + 4.0 * p[i + 1] - p[i + 2]) * t2 +
                           (-p[i - 1] + 3.0 * p[i] - 3.0 * p[i + 1] + p[i + 2]) * t3));
    }
  }
  out.push_back(ctrl.back());
  return out;
}

std::vector<double> arc_lengths(const std::vector<Vec3>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
  return s;
}

// Uniform arc-length resampling; both ends kept.
std::vector<Vec3> resample(const std::vector<Vec3>& pts, double spacing) {
  const auto s = arc_lengths(pts);
  const double total = s.back();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(total / spacing)));
  std::vector<Vec3> out;
  std::size_t j = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (j + 2 < pts.size() && s[j + 1] < target) ++j;
    const double span = s[j + 1] - s[j];
    const double t = span > 0.0 ? std::clamp((target - s[j]) / span, 0.0, 1.0) : 0.0;
    out.push_back(pts[j] + t * (pts[j + 1] - pts[j]));
  }
  out.front() = pts.front();
  out.back() = pts.back();
  return out;
}

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t segment = 0;
  double t = 0.0;
};

Nearest nearest_on(const Vec3& p, const std::vector<Vec3>& line) {
  Nearest best;
  if (line.size() == 1) {
    best.distance = (p - line[0]).norm();
    return best;
  }
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const SegmentProjection pr = project_to_segment(p, line[i], line[i + 1]);
    const double d = std::sqrt(pr.distance2);
    if (d < best.distance) best = {d, i, pr.t};
  }
  return best;
}

double radius_at(const TruthPolyline& pl, const Nearest& n) {
  if (pl.radii.size() == 1) return pl.radii[0];
  return pl.radii[n.segment] + n.t * (pl.radii[n.segment + 1] - pl.radii[n.segment]);
}

double max_radius(const TruthPolyline& pl) { return *std::max_element(pl.radii.begin(), pl.radii.end()); }

// Smallest centerline distance from vertices of `a` with arc length >= skip to `b`.
double min_distance(const TruthPolyline& a, const TruthPolyline& b, double skip = 0.0) {
  const auto s = arc_lengths(a.points);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (s[i] >= skip) best = std::min(best, nearest_on(a.points[i], b.points).distance);
  return best;
}

Vec3 tangent_at(const std::vector<Vec3>& pts, std::size_t i) {
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = std::min(pts.size() - 1, i + 1);
  return (pts[hi] - pts[lo]).normalized();
}

struct CaneShape {
  double tilt_x = 0.0;  // rad, toward +x
  double tilt_y = 0.0;
  double length = 0.5;
  double bow = 0.0;
  double radius = 0.005;
};

TruthPolyline make_cane(const Vec3& base, const CaneShape& c, std::int32_t parent, std::int32_t parent_vertex) {
  const Vec3 dir = Vec3(std::sin(c.tilt_x) * std::cos(c.tilt_y), std::sin(c.tilt_y), std::cos(c.tilt_x) * std::cos(c.tilt_y)).normalized();
  const Vec3 side(std::cos(c.tilt_x), 0.0, -std::sin(c.tilt_x));
  std::vector<Vec3> ctrl;
  for (int k = 0; k <= 3; ++k) {
    const double s = k / 3.0;
    ctrl.push_back(base + dir * (c.length * s) + side * (c.bow * c.length * std::sin(std::numbers::pi * s)));
  }
  TruthPolyline pl;
  pl.kind = TruthKind::cane;
  pl.points = resample(catmull_rom(ctrl, 24), kVertexSpacing);
  pl.points.front() = base;
  const auto s = arc_lengths(pl.points);
  for (double si : s) pl.radii.push_back(c.radius * (1.0 - 0.3 * si / s.back()));
  pl.parent = parent;
  pl.parent_vertex = parent_vertex;
  return pl;
}

// First crossing of the x-z projections of two polylines; arc lengths on each.
std::optional<std::pair<double, double>> xz_crossing(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const auto sa = arc_lengths(a);
  const auto sb = arc_lengths(b);
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    const Eigen::Vector2d p(a[i].x(), a[i].z()), r(a[i + 1].x() - a[i].x(), a[i + 1].z() - a[i].z());
    for (std::size_t j = 1; j + 1 < b.size(); ++j) {
      const Eigen::Vector2d q(b[j].x(), b[j].z()), s(b[j + 1].x() - b[j].x(), b[j + 1].z() - b[j].z());
      const double denom = r.x() * s.y() - r.y() * s.x();
      if (std::abs(denom) < 1e-15) continue;
      const Eigen::Vector2d qp = q - p;
      const double t = (qp.x() * s.y() - qp.y() * s.x()) / denom;
      const double u = (qp.x() * r.y() - qp.y() * r.x()) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0)
        return std::make_pair(sa[i] + t * (sa[i + 1] - sa[i]), sb[j] + u * (sb[j + 1] - sb[j]));
    }
  }
  return std::nullopt;
}

double interp_radius(const TruthPolyline& pl, double arc) {
  const auto s = arc_lengths(pl.points);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (arc <= s[i + 1]) {
      const double t = s[i + 1] > s[i] ? (arc - s[i]) / (s[i + 1] - s[i]) : 0.0;
      return pl.radii[i] + t * (pl.radii[i + 1] - pl.radii[i]);
    }
  return pl.radii.back();
}

void shift_y(TruthPolyline& pl, double amount, double full_at) {
  const auto s = arc_lengths(pl.points);
  for (std::size_t i = 0; i < pl.points.size(); ++i) {
    const double x = std::clamp(s[i] / full_at, 0.0, 1.0);
    pl.points[i].y() += amount * x * x * (3.0 - 2.0 * x);
  }
}

class Scene {
 public:
  explicit Scene(const VineSpec& spec) : spec_(spec) {}

  std::vector<TruthPolyline> lines;
  std::vector<std::int32_t> partner;  // loop partner per polyline, -1 if none

  // True when `cand` keeps the clearance from every polyline except
  // `ignore` entries; the part of the candidate near its parent is skipped.
  bool clear(const TruthPolyline& cand, std::initializer_list<std::int32_t> ignore) const {
    for (std::size_t q = 0; q < lines.size(); ++q) {
      if (std::find(ignore.begin(), ignore.end(), static_cast<std::int32_t>(q)) != ignore.end()) continue;
      const double need = max_radius(cand) + max_radius(lines[q]) + spec_.clearance;
      double skip = 0.0;
      if (cand.parent == static_cast<std::int32_t>(q)) skip = need + 0.02;
      if (min_distance(cand, lines[q], skip) <= need) return false;
      if (lines[q].parent == cand.parent && cand.parent >= 0) {
        // Siblings: both start on the parent; compare their free parts.
        const double skip_q = need + 0.02;
        if (min_distance(lines[q], cand, skip_q) <= need) return false;
      }
    }
    return true;
  }

 private:
  const VineSpec& spec_;
};

}  // namespace

std::vector<CameraModel> default_cameras(const VineSpec& spec) {
  std::vector<CameraModel> cams;
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  for (int k = 0; k < spec.n_cameras; ++k) {
    const double x = (k - (spec.n_cameras - 1) / 2.0) * 0.25;
    const Vec3 center(x, -spec.camera_distance, spec.cordon_height + 0.3);
    CameraModel cam;
    cam.pose.rotation = r;
    cam.pose.translation = -(r * center);
    cams.push_back(cam);
  }
  return cams;
}

Skeleton truth_skeleton(const GroundTruth& truth, bool include_barbs) {
  Skeleton sk;
  std::vector<std::vector<std::uint32_t>> ids(truth.polylines.size());
  for (std::size_t p = 0; p < truth.polylines.size(); ++p) {
    const TruthPolyline& pl = truth.polylines[p];
    if (pl.kind == TruthKind::barb && !include_barbs) continue;
    for (std::size_t i = 0; i < pl.points.size(); ++i) {
      if (i == 0 && pl.parent >= 0 && static_cast<std::size_t>(pl.parent) < p && !ids[static_cast<std::size_t>(pl.parent)].empty()) {
        ids[p].push_back(ids[static_cast<std::size_t>(pl.parent)][static_cast<std::size_t>(pl.parent_vertex)]);
        continue;
      }
      ids[p].push_back(static_cast<std::uint32_t>(sk.endpoints.size()));
      sk.endpoints.push_back(pl.points[i]);
    }
    for (std::size_t i = 0; i + 1 < pl.points.size(); ++i)
      sk.segments.push_back({ids[p][i], ids[p][i + 1], 0.5 * (pl.radii[i] + pl.radii[i + 1]), static_cast<std::int32_t>(p), 0});
  }
  return sk;
}

SyntheticVine generate_vine(const VineSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Scene scene(spec);

  {
    std::vector<Vec3> ctrl;
    for (int k = 0; k <= 4; ++k)
      ctrl.emplace_back(-spec.cordon_length / 2 + spec.cordon_length * k / 4.0, uniform(rng, -0.005, 0.005),
                        spec.cordon_height + uniform(rng, -0.01, 0.01));
    TruthPolyline cordon;
    cordon.kind = TruthKind::cordon;
    cordon.points = resample(catmull_rom(ctrl, 24), kVertexSpacing);
    cordon.radii.assign(cordon.points.size(), spec.cordon_radius);
    scene.lines.push_back(std::move(cordon));
    scene.partner.push_back(-1);
  }
  const std::size_t m = scene.lines[0].points.size();
  const double slot = 0.9 / std::max(1, spec.n_canes);

  auto attach_vertex = [&](int i) {
    const double f = 0.05 + slot * (i + 0.5) + uniform(rng, -0.15, 0.15) * slot;
    return static_cast<std::int32_t>(std::lround(std::clamp(f, 0.0, 1.0) * static_cast<double>(m - 1)));
  };
  auto random_shape = [&](double tilt_lo, double tilt_hi, double bow_scale) {
    CaneShape c;
    c.tilt_x = uniform(rng, tilt_lo, tilt_hi);
    c.length = uniform(rng, spec.cane_length_min, spec.cane_length_max);
    c.bow = spec.curvature * bow_scale * uniform(rng, -1.0, 1.0);
    c.radius = uniform(rng, spec.radius_min, spec.radius_max);
    return c;
  };

  constexpr int kTries = 200;
  int cane = 0;
  for (int pair = 0; pair < spec.loop_count; ++pair, cane += 2) {
    bool placed = false;
    for (int attempt = 0; attempt < kTries && !placed; ++attempt) {
      const std::int32_t va = attach_vertex(cane);
      const std::int32_t vb = attach_vertex(cane + 1);
      CaneShape sa = random_shape(0.35, 0.6, 0.3);
      CaneShape sb = random_shape(-0.6, -0.35, 0.3);
      TruthPolyline a = make_cane(scene.lines[0].points[static_cast<std::size_t>(va)], sa, 0, va);
      TruthPolyline b = make_cane(scene.lines[0].points[static_cast<std::size_t>(vb)], sb, 0, vb);
      const auto cross = xz_crossing(a.points, b.points);
      if (!cross) continue;
      const auto [arc_a, arc_b] = *cross;
      // Crossing must leave room past it and start clear of the cordon.
      if (arc_a > 0.75 * arc_lengths(a.points).back() || arc_b > 0.75 * arc_lengths(b.points).back()) continue;
      if (arc_a < 0.08 || arc_b < 0.08) continue;
      const double ra = interp_radius(a, arc_a), rb = interp_radius(b, arc_b);
      const double gap = a.points.front().y() - b.points.front().y();
      const double need = (ra + rb) - gap;
      shift_y(a, need / 2, 0.8 * arc_a);
      shift_y(b, -need / 2, 0.8 * arc_b);
      const auto self = static_cast<std::int32_t>(scene.lines.size());
      if (!scene.clear(a, {}) || !scene.clear(b, {})) continue;
      scene.lines.push_back(std::move(a));
      scene.lines.push_back(std::move(b));
      scene.partner.push_back(self + 1);
      scene.partner.push_back(self);
      placed = true;
    }
    if (!placed) throw SpecError("could not place loop pair " + std::to_string(pair));
  }
  for (; cane < spec.n_canes; ++cane) {
    bool placed = false;
    for (int attempt = 0; attempt < kTries && !placed; ++attempt) {
      const std::int32_t v = attach_vertex(cane);
      CaneShape s = random_shape(-0.45, 0.45, 1.0);
      s.tilt_y = uniform(rng, -0.15, 0.15);
      TruthPolyline c = make_cane(scene.lines[0].points[static_cast<std::size_t>(v)], s, 0, v);
      if (!scene.clear(c, {})) continue;
      scene.lines.push_back(std::move(c));
      scene.partner.push_back(-1);
      placed = true;
    }
    if (!placed) throw SpecError("could not place cane " + std::to_string(cane) + " without unplanned contact");
  }
  const std::size_t n_branches = scene.lines.size();
  for (int barb = 0; barb < spec.barb_count; ++barb) {
    bool placed = false;
    for (int attempt = 0; attempt < kTries && !placed; ++attempt) {
      const auto parent = static_cast<std::int32_t>(std::uniform_int_distribution<std::size_t>(0, n_branches - 1)(rng));
      const TruthPolyline& host = scene.lines[static_cast<std::size_t>(parent)];
      const std::size_t hn = host.points.size();
      const auto v = static_cast<std::size_t>(std::lround(uniform(rng, 0.15, 0.85) * static_cast<double>(hn - 1)));
      const Vec3 t = tangent_at(host.points, v);
      Vec3 d(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
      d -= d.dot(t) * t;
      if (d.norm() < 1e-3) continue;
      d.normalize();
      const double len = host.radii[v] + uniform(rng, 0.4, 1.0) * spec.barb_length_max;
      TruthPolyline b;
      b.kind = TruthKind::barb;
      b.points = resample({host.points[v], host.points[v] + d * len}, 0.005);
      b.radii.assign(b.points.size(), std::max(0.002, 0.5 * host.radii[v]));
      b.parent = parent;
      b.parent_vertex = static_cast<std::int32_t>(v);
      if (!scene.clear(b, {parent})) continue;
      scene.lines.push_back(std::move(b));
      scene.partner.push_back(-1);
      placed = true;
    }
    if (!placed) throw SpecError("could not place barb " + std::to_string(barb));
  }

  SyntheticVine out;
  GroundTruth& truth = out.truth;
  truth.polylines = scene.lines;
  truth.component_count = 1;
  truth.cycle_count = static_cast<std::size_t>(spec.loop_count);
  truth.pole_distance = uniform(rng, 0.1, 0.6);

  // Axis-aligned boxes for the inside-another-tube rejection test.
  std::vector<Eigen::AlignedBox3d> boxes;
  for (const auto& pl : truth.polylines) {
    Eigen::AlignedBox3d box;
    for (const auto& p : pl.points) box.extend(p);
    box.min().array() -= max_radius(pl);
    box.max().array() += max_radius(pl);
    boxes.push_back(box);
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t p = 0; p < truth.polylines.size(); ++p) {
    const TruthPolyline& pl = truth.polylines[p];
    const Label label = pl.kind == TruthKind::cordon ? Label::cordon : Label::cane;
    for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
      const Vec3 a = pl.points[i], b = pl.points[i + 1];
      const Vec3 axis = (b - a).normalized();
      const Vec3 helper = std::abs(axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      const Vec3 u = axis.cross(helper).normalized();
      const Vec3 w = axis.cross(u);
      const double expected = (b - a).norm() * spec.points_per_meter;
      auto count = static_cast<std::size_t>(expected);
      if (uniform(rng, 0.0, 1.0) < expected - static_cast<double>(count)) ++count;
      for (std::size_t k = 0; k < count; ++k) {
        const double t = uniform(rng, 0.0, 1.0);
        const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double r = pl.radii[i] + t * (pl.radii[i + 1] - pl.radii[i]);
        Vec3 pos = a + t * (b - a) + r * (std::cos(phi) * u + std::sin(phi) * w);
        if (spec.noise_sigma > 0.0) {
          const double nx = noise(rng), ny = noise(rng), nz = noise(rng);
          pos += spec.noise_sigma * Vec3(nx, ny, nz);
        }
        bool hidden = false;
        for (std::size_t q = 0; q < truth.polylines.size() && !hidden; ++q) {
          if (q == p || !boxes[q].contains(pos)) continue;
          const Nearest n = nearest_on(pos, truth.polylines[q].points);
          hidden = n.distance < radius_at(truth.polylines[q], n);
        }
        if (hidden) continue;
        Point pt;
        pt.position = pos;
        pt.label = label;
        out.cloud.points.push_back(pt);
        truth.point_class.push_back(label);
        truth.point_owner.push_back(static_cast<std::int32_t>(p));
      }
    }
  }

  out.cameras = default_cameras(spec);
  const Skeleton sk = truth_skeleton(truth, true);
  for (const auto& cam : out.cameras) out.masks.push_back(project_skeleton(sk, cam));
  return out;
}

std::size_t skeleton_cycle_rank(const Skeleton& skeleton) {
  std::vector<std::uint8_t> used(skeleton.endpoints.size(), 0);
  for (const Segment& s : skeleton.segments) used[s.a] = used[s.b] = 1;
  const auto v = static_cast<std::size_t>(std::count(used.begin(), used.end(), std::uint8_t{1}));
  const std::size_t c = count_clusters(skeleton);
  return skeleton.segments.size() + c - v;
}

namespace {

struct FlatSegment {
  Vec3 a, b;
  double ra = 0.0, rb = 0.0;
};

std::vector<Vec3> sample_segments(const std::vector<FlatSegment>& segs, double spacing) {
  std::vector<Vec3> out;
  for (const auto& s : segs) {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((s.b - s.a).norm() / spacing)));
    for (std::size_t k = 0; k < n; ++k) out.push_back(s.a + (static_cast<double>(k) + 0.5) / static_cast<double>(n) * (s.b - s.a));
  }
  return out;
}

std::pair<double, std::size_t> nearest_flat(const Vec3& p, const std::vector<FlatSegment>& segs, double* t_out = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const SegmentProjection pr = project_to_segment(p, segs[i].a, segs[i].b);
    if (pr.distance2 < best) {
      best = pr.distance2;
      idx = i;
      if (t_out) *t_out = pr.t;
    }
  }
  return {std::sqrt(best), idx};
}

}  // namespace

TruthScore score_against_truth(const Skeleton& skeleton, const GroundTruth& truth, const ScoreOptions& options) {
  if (!(options.sample_spacing > 0.0)) throw InvalidParameter("sample_spacing must be positive");
  if (options.segment_support && options.segment_support->size() != skeleton.segments.size())
    throw ShapeError("segment_support size does not match segments");
  std::vector<FlatSegment> truth_segs, model_segs;
  for (const auto& pl : truth.polylines) {
    if (pl.kind == TruthKind::barb && !options.include_barbs) continue;
    for (std::size_t i = 0; i + 1 < pl.points.size(); ++i)
      truth_segs.push_back({pl.points[i], pl.points[i + 1], pl.radii[i], pl.radii[i + 1]});
  }
  for (const auto& s : skeleton.segments)
    model_segs.push_back({skeleton.endpoints[s.a], skeleton.endpoints[s.b], s.radius, s.radius});

  TruthScore score;
  score.truth_components = truth.component_count;
  score.truth_cycles = truth.cycle_count;
  score.model_components = count_clusters(skeleton);
  score.model_cycles = skeleton_cycle_rank(skeleton);

  const double inf = std::numeric_limits<double>::infinity();
  double sum_m = 0.0, sum_t = 0.0;
  const auto model_samples = sample_segments(model_segs, options.sample_spacing);
  const auto truth_samples = sample_segments(truth_segs, options.sample_spacing);
  for (const auto& p : model_samples) sum_m += std::pow(truth_segs.empty() ? inf : nearest_flat(p, truth_segs).first, 2);
  for (const auto& p : truth_samples) sum_t += std::pow(model_segs.empty() ? inf : nearest_flat(p, model_segs).first, 2);
  score.model_to_truth_rms = model_samples.empty() ? 0.0 : std::sqrt(sum_m / static_cast<double>(model_samples.size()));
  score.truth_to_model_rms = truth_samples.empty() ? 0.0 : std::sqrt(sum_t / static_cast<double>(truth_samples.size()));
  const std::size_t total = model_samples.size() + truth_samples.size();
  score.centerline_rms = total == 0 ? 0.0 : std::sqrt((sum_m + sum_t) / static_cast<double>(total));

  score.radius_rel_error.assign(skeleton.segments.size(), 0.0);
  std::vector<double> used;
  if (!truth_segs.empty()) {
    for (std::size_t s = 0; s < model_segs.size(); ++s) {
      double t = 0.0;
      const Vec3 mid = 0.5 * (model_segs[s].a + model_segs[s].b);
      const std::size_t idx = nearest_flat(mid, truth_segs, &t).second;
      const double r_true = truth_segs[idx].ra + t * (truth_segs[idx].rb - truth_segs[idx].ra);
      const double rel = std::abs(skeleton.segments[s].radius - r_true) / r_true;
      score.radius_rel_error[s] = rel;
      if (!options.segment_support || (*options.segment_support)[s] >= options.min_support) used.push_back(rel);
    }
  }
  score.radius_segments = used.size();
  if (!used.empty()) {
    score.radius_rel_error_mean = std::accumulate(used.begin(), used.end(), 0.0) / static_cast<double>(used.size());
    score.radius_rel_error_max = *std::max_element(used.begin(), used.end());
    std::sort(used.begin(), used.end());
    const std::size_t h = used.size() / 2;
    score.radius_rel_error_median = used.size() % 2 ? used[h] : 0.5 * (used[h - 1] + used[h]);
  }
  return score;
}

}  // namespace vineskel
