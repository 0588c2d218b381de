// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/cloud.hpp"

#include "vineskel/error.hpp"

#include <array>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace vineskel {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::background: return "background";
    case Label::cane: return "cane";
    case Label::cordon: return "cordon";
    case Label::post: return "post";
    case Label::leaf: return "leaf";
    case Label::sign: return "sign";
  }
  return "unknown";
}

std::vector<Eigen::Vector3d> PointCloud::positions() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.position);
  return out;
}

PointCloud PointCloud::filter_labels(std::initializer_list<Label> labels) const {
  PointCloud out;
  for (const auto& p : points) {
    if (!p.label) continue;
    for (Label l : labels) {
      if (*p.label == l) {
        out.points.push_back(p);
        break;
      }
    }
  }
  return out;
}

std::size_t VoxelKeyHash::operator()(const VoxelKey& k) const noexcept {
  // Large odd multipliers; collisions only cost time, not correctness.
  auto h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
  h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

VoxelKey voxel_of(const Eigen::Vector3d& p, double voxel_size) {
  return {static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
          static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
          static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
}

namespace {

void check_voxel_size(double voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw InvalidParameter("voxel_size must be positive, got " + std::to_string(voxel_size));
  }
}

}  // namespace

DownsampleResult voxel_downsample_mapped(const PointCloud& cloud, double voxel_size) {
  check_voxel_size(voxel_size);

  struct Accum {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::size_t count = 0;
    std::array<std::size_t, kLabelCount> votes{};
  };

  std::unordered_map<VoxelKey, std::uint32_t, VoxelKeyHash> slot_of;
  slot_of.reserve(cloud.size());
  std::vector<Accum> accum;
  DownsampleResult result;
  result.source_to_voxel.reserve(cloud.size());

  for (const auto& p : cloud.points) {
    const auto key = voxel_of(p.position, voxel_size);
    auto [it, inserted] = slot_of.try_emplace(key, static_cast<std::uint32_t>(accum.size()));
    if (inserted) accum.emplace_back();
    auto& a = accum[it->second];
    a.sum += p.position;
    ++a.count;
    if (p.label) ++a.votes[static_cast<std::size_t>(*p.label)];
    result.source_to_voxel.push_back(it->second);
  }

  result.cloud.points.reserve(accum.size());
  for (const auto& a : accum) {
    Point out;
    out.position = a.sum / static_cast<double>(a.count);
    std::size_t best = 0;
    int best_label = -1;
    for (int l = 0; l < kLabelCount; ++l) {
      if (a.votes[l] > best) {
        best = a.votes[l];
        best_label = l;
      }
    }
    if (best_label >= 0) out.label = static_cast<Label>(best_label);
    result.cloud.points.push_back(out);
  }
  return result;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  return voxel_downsample_mapped(cloud, voxel_size).cloud;
}

std::size_t count_filled_voxels(const PointCloud& cloud, double voxel_size) {
  check_voxel_size(voxel_size);
  std::unordered_set<VoxelKey, VoxelKeyHash> occupied;
  occupied.reserve(cloud.size());
  for (const auto& p : cloud.points) occupied.insert(voxel_of(p.position, voxel_size));
  return occupied.size();
}

}  // namespace vineskel
