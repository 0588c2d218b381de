// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"
#include "vineskel/eval.hpp"
#include "vineskel/mask.hpp"
#include "vineskel/skeleton.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vineskel {

/// Parameters of a procedural vine: a horizontal cordon with canes grown
/// upward from it. World z is up; the cordon runs along x.
struct VineSpec {
  std::uint64_t seed = 0;
  int n_canes = 6;
  double cane_length_min = 0.35;   ///< m
  double cane_length_max = 0.70;   ///< m
  double curvature = 0.15;         ///< lateral bow as a fraction of cane length
  double radius_min = 0.003;       ///< cane base radius range (m)
  double radius_max = 0.008;
  double cordon_radius = 0.008;    ///< m
  int loop_count = 0;              ///< cane pairs crossing in contact
  int barb_count = 0;              ///< short twigs, shorter than barb_length_max
  double barb_length_max = 0.03;   ///< m, measured from the parent surface
  double noise_sigma = 0.0005;     ///< isotropic Gaussian surface noise (m)
  double points_per_meter = 3000;  ///< surface samples per meter of centerline
  double cordon_length = 1.0;      ///< m
  double cordon_height = 1.0;      ///< m
  double clearance = 0.03;         ///< extra surface gap kept between unrelated branches (m)
  int n_cameras = 3;
  double camera_distance = 1.2;    ///< m, along +y toward the vine

  /// Throws SpecError for an infeasible spec.
  void validate() const;
};

enum class TruthKind { cordon, cane, barb };

struct TruthPolyline {
  TruthKind kind = TruthKind::cane;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> radii;  ///< per vertex
  std::int32_t parent = -1;   ///< polyline this one grows from
  std::int32_t parent_vertex = -1;  ///< vertex of the parent equal to points.front()
};

struct GroundTruth {
  std::vector<TruthPolyline> polylines;
  std::size_t component_count = 1;
  std::size_t cycle_count = 0;
  double pole_distance = 0.0;                 ///< m
  std::vector<Label> point_class;             ///< per cloud point
  std::vector<std::int32_t> point_owner;      ///< polyline index per cloud point
};

/// Capsule chain of the true centerlines; children share the parent's
/// vertex so connectivity is carried by endpoint indices.
Skeleton truth_skeleton(const GroundTruth& truth, bool include_barbs = true);

struct SyntheticVine {
  PointCloud cloud;
  GroundTruth truth;
  std::vector<CameraModel> cameras;
  std::vector<Mask> masks;  ///< renders of the true skeleton, one per camera
};

/// Deterministic for a given spec.
SyntheticVine generate_vine(const VineSpec& spec);

/// Cameras looking along +y at the vine from `distance`, spread along x.
std::vector<CameraModel> default_cameras(const VineSpec& spec);

struct TruthScore {
  double centerline_rms = 0.0;     ///< symmetric, m
  double model_to_truth_rms = 0.0;
  double truth_to_model_rms = 0.0;
  std::vector<double> radius_rel_error;  ///< per skeleton segment
  double radius_rel_error_mean = 0.0;
  double radius_rel_error_median = 0.0;
  double radius_rel_error_max = 0.0;
  std::size_t radius_segments = 0;       ///< segments that entered the radius statistics
  std::size_t model_components = 0;
  std::size_t model_cycles = 0;
  std::size_t truth_components = 0;
  std::size_t truth_cycles = 0;
};

struct ScoreOptions {
  double sample_spacing = 0.002;  ///< m
  bool include_barbs = false;     ///< compare against barbs too
  /// Supporting point count per skeleton segment; when given, only segments
  /// with at least min_support points enter the radius statistics.
  std::optional<std::vector<std::size_t>> segment_support;
  std::size_t min_support = 30;
};

TruthScore score_against_truth(const Skeleton& skeleton, const GroundTruth& truth, const ScoreOptions& options = {});

/// E - V + C over endpoints referenced by segments.
std::size_t skeleton_cycle_rank(const Skeleton& skeleton);

}  // namespace vineskel
