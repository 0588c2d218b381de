// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <vector>

namespace vineskel {

/// Semantic classes; the numeric value is the on-disk label and the
/// tie-break order for majority voting.
enum class Label : std::uint8_t { background = 0, cane = 1, cordon = 2, post = 3, leaf = 4, sign = 5 };

inline constexpr int kLabelCount = 6;

std::string_view label_name(Label label);

struct Point {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<Label> label;
  std::optional<std::uint8_t> camera_id;
  std::optional<double> camera_distance;
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  std::vector<Eigen::Vector3d> positions() const;
  /// Points whose label is one of `labels`, in original order.
  PointCloud filter_labels(std::initializer_list<Label> labels) const;
};

/// Integer voxel coordinate; the grid origin is the world origin.
struct VoxelKey {
  std::int64_t x = 0, y = 0, z = 0;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept;
};

VoxelKey voxel_of(const Eigen::Vector3d& p, double voxel_size);

struct DownsampleResult {
  PointCloud cloud;
  /// For each input point, the index of the output point representing its voxel.
  std::vector<std::uint32_t> source_to_voxel;
};

/// One point per occupied voxel at the centroid of its members, ordered by
/// first occurrence. Throws InvalidParameter for voxel_size <= 0.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);
DownsampleResult voxel_downsample_mapped(const PointCloud& cloud, double voxel_size);

std::size_t count_filled_voxels(const PointCloud& cloud, double voxel_size);

}  // namespace vineskel
