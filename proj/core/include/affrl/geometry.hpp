#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <span>
#include <vector>

#include "affrl/error.hpp"

namespace affrl {

/// Axis-aligned pixel box with inclusive corners, origin at top-left.
/// Construction validates 0 <= x1 <= x2 and 0 <= y1 <= y2; treat instances
/// as immutable. Pixel area is (x2-x1+1) * (y2-y1+1).
struct Box {
  Box(int x1, int y1, int x2, int y2);

  int x1;
  int y1;
  int x2;
  int y2;

  long long area() const {
    return static_cast<long long>(x2 - x1 + 1) * static_cast<long long>(y2 - y1 + 1);
  }
  bool contains(int x, int y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Nonnegative integer pixel coordinate.
struct PointXY {
  PointXY() : x(0), y(0) {}
  PointXY(int x, int y);

  int x;
  int y;

  friend bool operator==(const PointXY&, const PointXY&) = default;
};

/// Row-major grid of nonnegative intensities. Binary masks use {0, 1}.
class MaskGrid {
 public:
  MaskGrid(int width, int height, double fill = 0.0);
  static MaskGrid from_values(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  double at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, double value);

  /// True when every value is exactly 0 or 1.
  bool is_binary() const;
  /// Number of pixels with value > 0.
  std::size_t foreground_count() const;

  friend bool operator==(const MaskGrid&, const MaskGrid&) = default;

 private:
  std::size_t index(int x, int y) const;

  int width_;
  int height_;
  std::vector<double> values_;
};

/// Intersection-over-union under the inclusive pixel-area convention.
/// Exact integer intersection/union counts; 0 for disjoint boxes.
double box_iou(const Box& a, const Box& b);

/// Sum of absolute corner-coordinate differences.
long long box_l1(const Box& a, const Box& b);

/// Two-coordinate L1 distance.
long long point_l1(const PointXY& a, const PointXY& b);

/// Tightest box covering every foreground pixel of a binary mask.
/// Throws EmptyMask when no pixel is set, NonBinaryMask on real-valued input.
Box mask_to_box(const MaskGrid& mask);

/// Arithmetic mean of the foreground pixel coordinates, rounded to the
/// nearest integer with ties away from zero. Same error conditions as
/// mask_to_box.
PointXY mask_centroid(const MaskGrid& mask);

/// Binary mask of the given size with 1 exactly on pixels covered by the
/// box. Throws OutOfBounds when the box does not fit.
MaskGrid rasterize_box(const Box& box, int width, int height);

}  // namespace affrl
