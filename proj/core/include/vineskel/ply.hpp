// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/cloud.hpp"

#include <filesystem>
#include <string>

namespace vineskel {

enum class PlyFormat { ascii, binary_little_endian };

/// Reads the "vertex" element: x, y, z (float or double) plus the optional
/// uchar `label`, uchar `camera_id` and float `camera_distance`. Unknown
/// properties and elements are skipped. A stored label of 255 means "no
/// label"; a negative camera_distance means "absent".
/// Throws ParseError naming the file and the byte offset of the problem.
PointCloud read_ply(const std::filesystem::path& path);
PointCloud parse_ply(const std::string& bytes, const std::string& source_name = "<memory>");

/// Optional properties are written only when at least one point carries them.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud,
               PlyFormat format = PlyFormat::binary_little_endian);
std::string serialize_ply(const PointCloud& cloud, PlyFormat format = PlyFormat::binary_little_endian);

}  // namespace vineskel
