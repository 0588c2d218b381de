// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/skeleton.hpp"
#include "vineskel/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vineskel {

struct FitParams {
  double seg_len = 0.10;             ///< target segment length (m)
  std::size_t batch_limit = 3000;    ///< max endpoints optimised jointly
  int max_iters = 50;
  double motion_tol = 1e-5;          ///< convergence: max endpoint motion (m)
  double initial_lambda = 1e-3;      ///< Levenberg-Marquardt damping
};

struct LineFit {
  Skeleton skeleton;               ///< radii unset
  std::vector<double> objective;   ///< summed squared distance after each assignment pass
  std::vector<std::int32_t> point_segment;  ///< final segment per point, -1 if unassigned
  std::vector<double> point_distance;       ///< distance to that segment (m)
  int iterations = 0;
  bool converged = false;

  double mse() const;
};

/// Fits connected line segments to every topology edge. Each edge is split
/// into max(1, round(length / seg_len)) segments whose inner endpoints
/// start at chain nodes evenly spaced by arc length; topology nodes map to
/// one endpoint shared by all incident edges. Endpoints are then refined by
/// alternating nearest-segment assignment (within the point's edge) and a
/// damped Gauss-Newton step on the summed squared point-to-segment
/// distance. Endpoint sets larger than batch_limit are optimised in
/// overlapping spans, one after another.
///
/// `point_edge[i]` is the topology edge of `points[i]` (-1 to ignore it).
LineFit fit_lines(const TopologyGraph& topo, const std::vector<Eigen::Vector3d>& points,
                  const std::vector<std::int32_t>& point_edge, const FitParams& params = {});

/// Weights of the joint radius least-squares problem. The objective is
/// gamma_p * sum (r_i - r_prior)^2 + gamma_s * sum_{i~j} (r_i - r_j)^2
///   + sum_k (r_{seg(k)} - delta_k)^2
/// where i~j ranges over segment pairs sharing an endpoint.
struct RadiusSystem {
  double gamma_p = 1.0;
  double gamma_s = 0.1;
  double r_prior = 0.005;
  double min_radius = 0.0005;

  /// gamma_p = p_scale * k and gamma_s = s_scale * k with k = |P| / |R|
  /// (k = 1 when no points are associated).
  static RadiusSystem scaled(std::size_t point_count, std::size_t segment_count, double p_scale = 1.0,
                             double s_scale = 0.1, double r_prior = 0.005);
};

/// Pairs of segments that share an endpoint, (i, j) with i < j, sorted.
std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacent_segment_pairs(const Skeleton& skeleton);

/// Solves the radius system (sparse normal equations) and clamps below at
/// min_radius. Segments with no data, no prior and no smoothing neighbour
/// get r_prior.
std::vector<double> solve_radii(const Skeleton& skeleton, const std::vector<std::int32_t>& point_segment,
                                const std::vector<double>& point_distance, const RadiusSystem& system);

Skeleton estimate_radii(const Skeleton& skeleton, const std::vector<std::int32_t>& point_segment,
                        const std::vector<double>& point_distance, const RadiusSystem& system);

}  // namespace vineskel
