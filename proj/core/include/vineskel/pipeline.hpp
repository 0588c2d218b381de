// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"
#include "vineskel/eval.hpp"
#include "vineskel/fit.hpp"
#include "vineskel/graph.hpp"
#include "vineskel/register.hpp"
#include "vineskel/skeleton.hpp"
#include "vineskel/topology.hpp"
#include "vineskel/vigor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vineskel {

struct SkeletonizeParams {
  double voxel_size = 0.015;  ///< downsampling before graph building (m)
  GraphConfig graph;
  bool close_cycles = true;
  RootSelection root;
  FitParams fit;
  double gamma_p_scale = 1.0;
  double gamma_s_scale = 0.1;
  double r_prior = 0.005;
  std::size_t min_cluster_nodes = 2;  ///< smaller clusters produce no segments

  void validate() const;
};

struct SkeletonizeResult {
  PointCloud downsampled;
  SpatialGraph local;
  SpatialGraph mst;
  SpatialGraph closed;
  SpatialGraph smooth;                     ///< after barb removal
  std::vector<TopologyGraph> topologies;   ///< one per kept cluster
  Skeleton skeleton;                       ///< cluster_id = index into topologies
  std::vector<std::size_t> segment_support;  ///< associated points per segment
  std::vector<std::vector<double>> objective_history;  ///< per cluster
  std::size_t closure_edges = 0;
};

/// Downsample -> local graph -> MST -> cycle closure -> orient and remove
/// barbs -> topology -> line fit -> radii. Clusters run in parallel.
SkeletonizeResult skeletonize(const PointCloud& cloud, const SkeletonizeParams& params = {}, int threads = 1);

/// Every knob of the end-to-end run. Paths are absolute or relative to the
/// working directory (load_config resolves them against the config file).
struct PipelineConfig {
  std::filesystem::path cloud;        ///< labelled vine cloud (PLY)
  std::filesystem::path frames;       ///< optional frame list; registration replaces `cloud`
  std::filesystem::path cams;         ///< cameras JSON
  std::filesystem::path masks;        ///< directory of cane masks, one per camera in name order
  std::filesystem::path out_dir = "out";
  std::string vine_id = "vine";
  double pole_distance = 0.0;
  std::optional<double> pruning_weight;

  IcpParams icp;
  bool discard_far = true;
  double overlap_radius = 0.02;
  double distance_margin = 0.25;

  bool refine_masks = false;
  int dilation_radius = 3;
  bool overlays = false;

  std::vector<Label> skeleton_labels = {Label::cane, Label::cordon};
  SkeletonizeParams skeleton;
  double feature_voxel_size = 0.02;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

struct PipelineArtifacts {
  SkeletonizeResult skeleton;
  IoUReport iou;
  VineFeatures features;
  std::vector<std::filesystem::path> written;
};

/// Runs every stage and writes its artifact under out_dir. A failing stage
/// throws StageError carrying the stage name; artifacts already written
/// are left in place.
PipelineArtifacts run_pipeline(const PipelineConfig& config);

/// The cloud the skeleton is built from: points labelled with one of
/// `labels`, or every point when the cloud carries no labels at all.
PointCloud select_vine_points(const PointCloud& cloud, const std::vector<Label>& labels);

}  // namespace vineskel
