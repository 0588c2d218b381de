// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/eval.hpp"
#include "vineskel/graph.hpp"
#include "vineskel/register.hpp"
#include "vineskel/skeleton.hpp"
#include "vineskel/synth.hpp"
#include "vineskel/topology.hpp"
#include "vineskel/vigor.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vineskel {

inline constexpr std::string_view kSkeletonVersion = "vineskel-skeleton/1";

std::string read_text(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: whole buffer, binary mode.
void write_text(const std::filesystem::path& path, std::string_view text);

/// {"version", "endpoints": [[x,y,z]...], "segments": [{a,b,radius,edge_id,cluster_id}...]}
std::string skeleton_to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(std::string_view text, const std::string& source = "<memory>");
Skeleton read_skeleton(const std::filesystem::path& path);

/// {"nodes": [[x,y,z]...], "edges": [[i,j]...]}
std::string graph_to_json(const SpatialGraph& graph);
/// {"clusters": [{"nodes": [{id,kind,position}], "edges": [{chain, length}], "warnings"}]}
std::string topology_to_json(const std::vector<TopologyGraph>& clusters);

/// Array of {fx, fy, cx, cy, width, height, pose: 16 row-major}.
std::string cameras_to_json(const std::vector<CameraModel>& cams);
std::vector<CameraModel> cameras_from_json(std::string_view text, const std::string& source = "<memory>");
std::vector<CameraModel> read_cameras(const std::filesystem::path& path);

/// Array of {camera_id, pose: 16 row-major camera-to-world, file, sequence}.
/// `file` is resolved relative to the poses file's directory.
struct FrameRecord {
  std::uint8_t camera_id = 0;
  RigidTransform pose;
  std::filesystem::path file;
  Sequence sequence = Sequence::horizontal;
};
std::vector<FrameRecord> read_frame_records(const std::filesystem::path& path);
std::string poses_to_json(const std::vector<FramePose>& poses);

std::string iou_report_to_json(const IoUReport& report);
std::string fold_report_to_json(const FoldReport& report);
std::string drop_one_to_json(const std::vector<std::pair<std::string, FoldReport>>& reports);
std::string linear_model_to_json(const LinearModel& model);

/// Header: vine_id,cane_voxels,cordon_voxels,pole_distance_m,skeleton_length_m,cane_pixels,pruning_weight_kg.
/// An empty weight cell means unknown.
std::string features_to_csv(const std::vector<VineFeatures>& rows);
std::vector<VineFeatures> features_from_csv(std::string_view text, const std::string& source = "<memory>");
std::vector<VineFeatures> read_features(const std::filesystem::path& path);

/// Keys match the VineSpec field names; unknown keys are rejected.
VineSpec vine_spec_from_json(std::string_view text, const std::string& source = "<memory>");
std::string vine_spec_to_json(const VineSpec& spec);
std::string truth_to_json(const GroundTruth& truth);
std::string truth_score_to_json(const TruthScore& score);

/// Image files (png, pgm) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_mask_files(const std::filesystem::path& dir);

}  // namespace vineskel
