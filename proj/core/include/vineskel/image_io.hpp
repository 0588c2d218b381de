// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/mask.hpp"

#include <filesystem>

namespace vineskel {

/// Reads a PNG (any bit depth or colour type) or a PGM (P2/P5); any non-zero
/// sample becomes foreground. Format is chosen by file signature.
Mask read_mask(const std::filesystem::path& path);

/// Single-channel 8-bit PNG with values 0/255.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
/// Binary PGM (P5), 0/255.
void write_mask_pgm(const std::filesystem::path& path, const Mask& mask);

/// Three-colour comparison overlay: green where both are set, orange where
/// only `truth` is set, red where only `model` is set, black elsewhere.
void write_overlay_png(const std::filesystem::path& path, const Mask& model, const Mask& truth);

}  // namespace vineskel
