// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vineskel {

/// Binary image, row-major, one byte (0 or 1) per pixel.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height);
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool same_shape(const Mask& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

  bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool get(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  /// Out-of-bounds reads as background.
  bool get_or_zero(int x, int y) const noexcept { return in_bounds(x, y) && get(x, y); }
  void set(int x, int y, bool v = true) noexcept { bits_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// True when every set pixel of *this is set in `other`.
  bool subset_of(const Mask& other) const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);

/// Number of 8-connected foreground components.
std::size_t count_components(const Mask& mask);

/// Zhang-Suen two-subiteration thinning. Each candidate is re-checked
/// against the current image before deletion and removed only if it is a
/// simple point (8-connectivity) and not an end point, so component count
/// is preserved and the result is a subset of the input.
Mask thin_skeleton(const Mask& mask);

/// Dilation by the disk { (dx, dy) : dx^2 + dy^2 <= r^2 }.
Mask dilate(const Mask& mask, int radius_px);

/// thin -> dilate -> intersect with the input: keeps the band around the
/// medial axis and drops the outer rim.
Mask refine_cane_mask(const Mask& mask, int radius_px);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Throws ShapeError on dimension mismatch. Both masks empty gives (1, 1, 1);
/// any other zero denominator gives 0.
PrecisionRecall precision_recall(const Mask& predicted, const Mask& truth);

}  // namespace vineskel
