// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/fit.hpp"

#include "vineskel/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace vineskel {

double Skeleton::total_length() const {
  double total = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) total += segment_length(s);
  return total;
}

void Skeleton::append(const Skeleton& other) {
  const auto offset = static_cast<std::uint32_t>(endpoints.size());
  endpoints.insert(endpoints.end(), other.endpoints.begin(), other.endpoints.end());
  for (Segment s : other.segments) {
    s.a += offset;
    s.b += offset;
    segments.push_back(s);
  }
}

SegmentProjection project_to_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d d = b - a;
  const double len2 = d.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return {t, (p - (a + t * d)).squaredNorm()};
}

double LineFit::mse() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < point_segment.size(); ++i) {
    if (point_segment[i] < 0) continue;
    sum += point_distance[i] * point_distance[i];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kAlongWeight = 1e-2;

struct Problem {
  std::vector<Eigen::Vector3d> x;
  std::vector<Segment> segments;
  std::vector<std::vector<std::uint32_t>> edge_segments;
  std::vector<std::vector<std::uint32_t>> edge_endpoints;  // chain order
  const std::vector<Eigen::Vector3d>* points = nullptr;
  const std::vector<std::int32_t>* point_edge = nullptr;
  std::vector<std::int32_t> assignment;
  std::vector<std::vector<std::uint32_t>> segment_points;

  // Nearest segment of the point's own edge; returns the summed objective.
  double assign() {
    double total = 0.0;
    for (auto& list : segment_points) list.clear();
    for (std::size_t i = 0; i < points->size(); ++i) {
      assignment[i] = -1;
      const std::int32_t e = (*point_edge)[i];
      if (e < 0 || static_cast<std::size_t>(e) >= edge_segments.size()) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t s : edge_segments[static_cast<std::size_t>(e)]) {
        const double d2 = project_to_segment((*points)[i], x[segments[s].a], x[segments[s].b]).distance2;
        if (d2 < best) {
          best = d2;
          assignment[i] = static_cast<std::int32_t>(s);
        }
      }
      if (assignment[i] >= 0) {
        total += best;
        segment_points[static_cast<std::size_t>(assignment[i])].push_back(static_cast<std::uint32_t>(i));
      }
    }
    return total;
  }

  double objective(const std::vector<std::uint32_t>& active, const std::vector<Eigen::Vector3d>& state) const {
    double total = 0.0;
    for (std::uint32_t s : active)
      for (std::uint32_t i : segment_points[s])
        total += project_to_segment((*points)[i], state[segments[s].a], state[segments[s].b]).distance2;
    return total;
  }
};

// One damped Gauss-Newton step over the free endpoints of a batch. The
// residual of an interior point is its perpendicular offset from the
// segment line; a clamped point uses the offset from the nearer endpoint.
// Sliding an endpoint along its line leaves interior residuals unchanged,
// so the along-line part of the fixed-parameter Jacobian is kept with a
// small weight to pin that direction. Returns the largest accepted
// endpoint motion.
double lm_step(Problem& prob, const std::vector<std::uint32_t>& free, double& lambda) {
  std::vector<std::int32_t> local(prob.x.size(), -1);
  for (std::size_t k = 0; k < free.size(); ++k) local[free[k]] = static_cast<std::int32_t>(k);

  std::vector<std::uint32_t> active;
  for (std::uint32_t s = 0; s < prob.segments.size(); ++s)
    if (local[prob.segments[s].a] >= 0 || local[prob.segments[s].b] >= 0) active.push_back(s);
  if (active.empty()) return 0.0;

  const auto n = static_cast<Eigen::Index>(3 * free.size());
  std::vector<Triplet> triplets;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  bool any_point = false;
  for (std::uint32_t s : active) {
    const Segment& seg = prob.segments[s];
    const Eigen::Vector3d& a = prob.x[seg.a];
    const Eigen::Vector3d& b = prob.x[seg.b];
    const Eigen::Vector3d d = b - a;
    const double len = d.norm();
    for (std::uint32_t i : prob.segment_points[s]) {
      any_point = true;
      const Eigen::Vector3d& p = (*prob.points)[i];
      const SegmentProjection proj = project_to_segment(p, a, b);
      Eigen::Matrix3d proj_mat = Eigen::Matrix3d::Identity();
      Eigen::Matrix3d gram = Eigen::Matrix3d::Identity();
      double wa = 1.0 - proj.t;
      double wb = proj.t;
      Eigen::Vector3d r;
      if (len > 0.0 && proj.t > 0.0 && proj.t < 1.0) {
        const Eigen::Vector3d u = d / len;
        proj_mat -= u * u.transpose();
        gram = proj_mat + kAlongWeight * u * u.transpose();
        r = proj_mat * (p - a);
      } else {
        r = p - (a + proj.t * d);
      }
      // J_a = -wa * P, J_b = -wb * P with P symmetric idempotent.
      const std::array<std::pair<std::int32_t, double>, 2> ends{{{local[seg.a], wa}, {local[seg.b], wb}}};
      for (const auto& [li, wi] : ends) {
        if (li < 0 || wi == 0.0) continue;
        g.segment<3>(3 * li) -= wi * r;
        for (const auto& [lj, wj] : ends) {
          if (lj < 0 || wj == 0.0) continue;
          const Eigen::Matrix3d block = wi * wj * gram;
          for (int rr = 0; rr < 3; ++rr)
            for (int cc = 0; cc < 3; ++cc)
              if (block(rr, cc) != 0.0) triplets.emplace_back(3 * li + rr, 3 * lj + cc, block(rr, cc));
        }
      }
    }
  }
  if (!any_point) return 0.0;

  Sparse h(n, n);
  h.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd diag = h.diagonal();
  const double tau = 1e-9 * std::max(diag.mean(), 1e-12);

  const double before = prob.objective(active, prob.x);
  if (before == 0.0) return 0.0;
  std::vector<Eigen::Vector3d> trial = prob.x;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Sparse damped = h;
    for (Eigen::Index k = 0; k < n; ++k) damped.coeffRef(k, k) += lambda * (diag[k] + tau);
    Eigen::SimplicialLDLT<Sparse> solver(damped);
    if (solver.info() == Eigen::Success) {
      const Eigen::VectorXd delta = solver.solve(-g);
      if (solver.info() == Eigen::Success && delta.allFinite()) {
        double motion = 0.0;
        for (std::size_t k = 0; k < free.size(); ++k) {
          const Eigen::Vector3d step = delta.segment<3>(static_cast<Eigen::Index>(3 * k));
          trial[free[k]] = prob.x[free[k]] + step;
          motion = std::max(motion, step.norm());
        }
        if (prob.objective(active, trial) < before) {
          for (std::uint32_t v : free) prob.x[v] = trial[v];
          lambda = std::max(lambda / 10.0, 1e-12);
          return motion;
        }
      }
    }
    lambda *= 10.0;
  }
  return 0.0;
}

std::vector<std::vector<std::uint32_t>> make_batches(const Problem& prob, std::size_t limit) {
  std::vector<std::vector<std::uint32_t>> batches;
  if (prob.x.size() <= limit) {
    std::vector<std::uint32_t> all(prob.x.size());
    std::iota(all.begin(), all.end(), 0u);
    batches.push_back(std::move(all));
    return batches;
  }
  std::vector<std::uint32_t> current;
  std::vector<std::uint8_t> seen(prob.x.size(), 0);  // member of current batch
  for (const auto& chain : prob.edge_endpoints) {
    for (std::uint32_t v : chain) {
      if (seen[v]) continue;
      current.push_back(v);
      seen[v] = 1;
      if (current.size() == limit) {
        const std::uint32_t carry = current.back();
        for (std::uint32_t u : current) seen[u] = 0;
        batches.push_back(std::move(current));
        current = {carry};
        seen[carry] = 1;
      }
    }
  }
  if (current.size() > 1 || batches.empty()) batches.push_back(std::move(current));
  return batches;
}

// Index of the chain node nearest `target` arc length within [lo, hi].
std::size_t nearest_by_arc(const std::vector<double>& arc, double target, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k)
    if (std::abs(arc[k] - target) < std::abs(arc[best] - target)) best = k;
  return best;
}

}  // namespace

LineFit fit_lines(const TopologyGraph& topo, const std::vector<Eigen::Vector3d>& points,
                  const std::vector<std::int32_t>& point_edge, const FitParams& params) {
  if (!(params.seg_len > 0.0)) throw InvalidParameter("seg_len must be positive");
  if (params.batch_limit < 2) throw InvalidParameter("batch_limit must be at least 2");
  if (params.max_iters < 0) throw InvalidParameter("max_iters must be non-negative");
  if (point_edge.size() != points.size()) throw ShapeError("point_edge size does not match points");

  LineFit out;
  out.point_segment.assign(points.size(), -1);
  out.point_distance.assign(points.size(), 0.0);
  if (topo.empty()) {
    out.converged = true;
    return out;
  }

  Problem prob;
  prob.points = &points;
  prob.point_edge = &point_edge;
  std::map<NodeId, std::uint32_t> shared;
  auto topo_endpoint = [&](NodeId id) {
    auto [it, inserted] = shared.try_emplace(id, static_cast<std::uint32_t>(prob.x.size()));
    if (inserted) prob.x.push_back(topo.positions[id]);
    return it->second;
  };

  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& chain = topo.edges[e].chain;
    std::vector<std::uint32_t> eps;
    std::vector<std::uint32_t> segs;
    if (chain.size() >= 2) {
      std::vector<double> arc(chain.size(), 0.0);
      for (std::size_t k = 1; k < chain.size(); ++k)
        arc[k] = arc[k - 1] + (topo.positions[chain[k]] - topo.positions[chain[k - 1]]).norm();
      const double length = arc.back();
      const bool closed = chain.front() == chain.back();
      auto n_seg = static_cast<std::size_t>(std::max(1.0, std::round(length / params.seg_len)));
      if (closed) n_seg = std::max<std::size_t>(n_seg, 3);
      n_seg = std::min(n_seg, chain.size() - 1);

      eps.push_back(topo_endpoint(chain.front()));
      std::size_t prev = 0;
      for (std::size_t k = 1; k < n_seg; ++k) {
        const std::size_t hi = chain.size() - 1 - (n_seg - k);
        const std::size_t idx = nearest_by_arc(arc, length * static_cast<double>(k) / static_cast<double>(n_seg), prev + 1, hi);
        eps.push_back(static_cast<std::uint32_t>(prob.x.size()));
        prob.x.push_back(topo.positions[chain[idx]]);
        prev = idx;
      }
      eps.push_back(topo_endpoint(chain.back()));
      for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
        segs.push_back(static_cast<std::uint32_t>(prob.segments.size()));
        prob.segments.push_back({eps[k], eps[k + 1], 0.0, static_cast<std::int32_t>(e), 0});
      }
    }
    prob.edge_endpoints.push_back(std::move(eps));
    prob.edge_segments.push_back(std::move(segs));
  }

  prob.assignment.assign(points.size(), -1);
  prob.segment_points.assign(prob.segments.size(), {});
  out.objective.push_back(prob.assign());

  const auto batches = make_batches(prob, params.batch_limit);
  std::vector<double> lambda(batches.size(), params.initial_lambda);
  for (int it = 0; it < params.max_iters; ++it) {
    double motion = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) motion = std::max(motion, lm_step(prob, batches[b], lambda[b]));
    out.objective.push_back(prob.assign());
    out.iterations = it + 1;
    if (motion < params.motion_tol) {
      out.converged = true;
      break;
    }
  }
  if (params.max_iters == 0) out.converged = true;

  out.skeleton.endpoints = prob.x;
  out.skeleton.segments = prob.segments;
  out.point_segment = prob.assignment;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::int32_t s = out.point_segment[i];
    if (s < 0) continue;
    const Segment& seg = prob.segments[static_cast<std::size_t>(s)];
    out.point_distance[i] = std::sqrt(project_to_segment(points[i], prob.x[seg.a], prob.x[seg.b]).distance2);
  }
  return out;
}

RadiusSystem RadiusSystem::scaled(std::size_t point_count, std::size_t segment_count, double p_scale,
                                  double s_scale, double r_prior) {
  double k = 1.0;
  if (point_count > 0 && segment_count > 0)
    k = static_cast<double>(point_count) / static_cast<double>(segment_count);
  RadiusSystem sys;
  sys.gamma_p = p_scale * k;
  sys.gamma_s = s_scale * k;
  sys.r_prior = r_prior;
  return sys;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacent_segment_pairs(const Skeleton& skeleton) {
  std::vector<std::vector<std::uint32_t>> incident(skeleton.endpoints.size());
  for (std::uint32_t s = 0; s < skeleton.segments.size(); ++s) {
    incident[skeleton.segments[s].a].push_back(s);
    if (skeleton.segments[s].b != skeleton.segments[s].a) incident[skeleton.segments[s].b].push_back(s);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& list : incident)
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j)
        pairs.emplace_back(std::min(list[i], list[j]), std::max(list[i], list[j]));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<double> solve_radii(const Skeleton& skeleton, const std::vector<std::int32_t>& point_segment,
                                const std::vector<double>& point_distance, const RadiusSystem& system) {
  if (system.gamma_p < 0.0 || system.gamma_s < 0.0) throw InvalidParameter("radius weights must be non-negative");
  if (!(system.r_prior > 0.0)) throw InvalidParameter("r_prior must be positive");
  if (point_segment.size() != point_distance.size()) throw ShapeError("point_segment and point_distance sizes differ");

  const std::size_t n = skeleton.segments.size();
  if (n == 0) return {};
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), system.gamma_p * system.r_prior);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), system.gamma_p);
  for (std::size_t i = 0; i < point_segment.size(); ++i) {
    const std::int32_t s = point_segment[i];
    if (s < 0) continue;
    if (static_cast<std::size_t>(s) >= n) throw ShapeError("point associated to a missing segment");
    diag[s] += 1.0;
    rhs[s] += point_distance[i];
  }

  std::vector<Triplet> triplets;
  const auto pairs = system.gamma_s > 0.0 ? adjacent_segment_pairs(skeleton)
                                          : std::vector<std::pair<std::uint32_t, std::uint32_t>>{};
  std::vector<std::uint8_t> coupled(n, 0);
  for (const auto& [i, j] : pairs) {
    diag[i] += system.gamma_s;
    diag[j] += system.gamma_s;
    triplets.emplace_back(i, j, -system.gamma_s);
    triplets.emplace_back(j, i, -system.gamma_s);
    coupled[i] = coupled[j] = 1;
  }
  // Rows with nothing at all would leave the system singular.
  for (std::size_t s = 0; s < n; ++s) {
    if (diag[static_cast<Eigen::Index>(s)] == 0.0 && !coupled[s]) {
      diag[static_cast<Eigen::Index>(s)] = 1.0;
      rhs[static_cast<Eigen::Index>(s)] = system.r_prior;
    }
  }
  for (std::size_t s = 0; s < n; ++s) triplets.emplace_back(s, s, diag[static_cast<Eigen::Index>(s)]);

  Sparse a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd r;
  Eigen::SimplicialLDLT<Sparse> solver(a);
  if (solver.info() == Eigen::Success) r = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !r.allFinite() || r.size() == 0) {
    // Only reachable with gamma_p = 0 and a coupled group without data.
    r = Eigen::MatrixXd(a).completeOrthogonalDecomposition().solve(rhs);
  }
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = std::max(r[static_cast<Eigen::Index>(s)], system.min_radius);
  return out;
}

Skeleton estimate_radii(const Skeleton& skeleton, const std::vector<std::int32_t>& point_segment,
                        const std::vector<double>& point_distance, const RadiusSystem& system) {
  Skeleton out = skeleton;
  const auto radii = solve_radii(skeleton, point_segment, point_distance, system);
  for (std::size_t s = 0; s < out.segments.size(); ++s) out.segments[s].radius = radii[s];
  return out;
}

}  // namespace vineskel
