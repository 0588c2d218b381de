// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/mask.hpp"

#include "vineskel/error.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

namespace vineskel {

Mask::Mask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InvalidParameter("mask dimensions must be non-negative");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InvalidParameter("mask dimensions must be non-negative");
  if (bits.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeError("mask bits length " + std::to_string(bits.size()) + " does not match " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
  for (auto& b : bits) b = b != 0 ? 1 : 0;
  bits_ = std::move(bits);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool Mask::subset_of(const Mask& other) const {
  if (!same_shape(other)) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

namespace {

void require_same_shape(const Mask& a, const Mask& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": mask shapes differ (" + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()) + ")");
  }
}

// Neighbours in Zhang-Suen order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<std::pair<int, int>, 8> kRing{
    {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

std::array<int, 8> ring(const Mask& m, int x, int y) {
  std::array<int, 8> p{};
  for (std::size_t k = 0; k < 8; ++k) p[k] = m.get_or_zero(x + kRing[k].first, y + kRing[k].second) ? 1 : 0;
  return p;
}

int neighbours(const std::array<int, 8>& p) {
  int b = 0;
  for (int v : p) b += v;
  return b;
}

int transitions(const std::array<int, 8>& p) {
  int a = 0;
  for (std::size_t k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1) ? 1 : 0;
  return a;
}

// Yokoi connectivity number for 8-connected foreground. A pixel is simple
// (deletable without changing topology) iff this equals 1.
int connectivity8(const std::array<int, 8>& p) {
  // Yokoi order x1..x8 = E, NE, N, NW, W, SW, S, SE.
  const std::array<int, 8> x{p[2], p[1], p[0], p[7], p[6], p[5], p[4], p[3]};
  int c = 0;
  for (std::size_t k = 0; k < 8; k += 2) {
    const int a = 1 - x[k];
    const int b = 1 - x[(k + 1) % 8];
    const int d = 1 - x[(k + 2) % 8];
    c += a - a * b * d;
  }
  return c;
}

}  // namespace

Mask mask_and(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "mask_and");
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a.bits()[i] & b.bits()[i];
  return Mask(a.width(), a.height(), std::move(bits));
}

Mask mask_or(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "mask_or");
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a.bits()[i] | b.bits()[i];
  return Mask(a.width(), a.height(), std::move(bits));
}

std::size_t count_components(const Mask& mask) {
  std::vector<std::uint8_t> seen(mask.bits().size(), 0);
  std::vector<std::pair<int, int>> stack;
  std::size_t components = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto i = static_cast<std::size_t>(y) * mask.width() + x;
      if (!mask.get(x, y) || seen[i]) continue;
      ++components;
      seen[i] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!mask.get_or_zero(nx, ny)) continue;
            const auto j = static_cast<std::size_t>(ny) * mask.width() + nx;
            if (seen[j]) continue;
            seen[j] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return components;
}

Mask thin_skeleton(const Mask& mask) {
  Mask img = mask;
  std::vector<std::pair<int, int>> candidates;
  for (bool changed = true; changed;) {
    changed = false;
    for (int step = 0; step < 2; ++step) {
      candidates.clear();
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (!img.get(x, y)) continue;
          const auto p = ring(img, x, y);
          const int b = neighbours(p);
          if (b < 2 || b > 6 || transitions(p) != 1) continue;
          // P2=p[0], P4=p[2], P6=p[4], P8=p[6]
          const bool ok = step == 0 ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                                    : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
          if (ok) candidates.push_back({x, y});
        }
      }
      for (const auto& [x, y] : candidates) {
        const auto p = ring(img, x, y);
        if (neighbours(p) >= 2 && connectivity8(p) == 1) {
          img.set(x, y, false);
          changed = true;
        }
      }
    }
  }
  return img;
}

Mask dilate(const Mask& mask, int radius_px) {
  if (radius_px < 0) throw InvalidParameter("dilation radius must be non-negative");
  if (radius_px == 0) return mask;
  // Half-width of the disk for each row offset.
  std::vector<int> half(static_cast<std::size_t>(radius_px) + 1);
  for (int dy = 0; dy <= radius_px; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= radius_px * radius_px) ++w;
    half[dy] = w;
  }
  Mask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      for (int dy = -radius_px; dy <= radius_px; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= mask.height()) continue;
        const int w = half[static_cast<std::size_t>(dy < 0 ? -dy : dy)];
        const int x0 = std::max(0, x - w), x1 = std::min(mask.width() - 1, x + w);
        for (int nx = x0; nx <= x1; ++nx) out.set(nx, ny);
      }
    }
  }
  return out;
}

Mask refine_cane_mask(const Mask& mask, int radius_px) {
  if (radius_px < 0) throw InvalidParameter("dilation radius must be non-negative");
  return mask_and(dilate(thin_skeleton(mask), radius_px), mask);
}

PrecisionRecall precision_recall(const Mask& predicted, const Mask& truth) {
  require_same_shape(predicted, truth, "precision_recall");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.bits().size(); ++i) {
    const bool p = predicted.bits()[i] != 0, t = truth.bits()[i] != 0;
    tp += (p && t) ? 1 : 0;
    fp += (p && !t) ? 1 : 0;
    fn += (!p && t) ? 1 : 0;
  }
  if (tp + fp == 0 && tp + fn == 0) return {1.0, 1.0, 1.0};
  PrecisionRecall r;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

}  // namespace vineskel
