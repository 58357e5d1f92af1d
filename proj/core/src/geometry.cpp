// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace affrl {

Box::Box(int x1, int y1, int x2, int y2) : x1(x1), y1(y1), x2(x2), y2(y2) {
  if (x1 < 0 || y1 < 0) throw Error("InvalidBox", "negative corner coordinate");
  if (x2 < x1 || y2 < y1) throw Error("InvalidBox", "corners out of order");
}

PointXY::PointXY(int x, int y) : x(x), y(y) {
  if (x < 0 || y < 0) throw Error("InvalidPoint", "negative coordinate");
}

MaskGrid::MaskGrid(int width, int height, double fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error("InvalidMask", "nonpositive dimensions");
  if (fill < 0.0) throw Error("InvalidMask", "negative fill value");
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

MaskGrid MaskGrid::from_values(int width, int height, std::vector<double> values) {
  MaskGrid grid(width, height);
  if (values.size() != grid.values_.size())
    throw Error("InvalidMask", "value count does not match width*height");
  for (double v : values)
    if (v < 0.0) throw Error("InvalidMask", "negative value");
  grid.values_ = std::move(values);
  return grid;
}

void MaskGrid::set(int x, int y, double value) {
  if (value < 0.0) throw Error("InvalidMask", "negative value");
  values_[index(x, y)] = value;
}

bool MaskGrid::is_binary() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

std::size_t MaskGrid::foreground_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; }));
}

std::size_t MaskGrid::index(int x, int y) const {
  if (x < 0 || x >= width_ || y < 0 || y >= height_)
    throw Error("OutOfBounds", "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                   ") outside " + std::to_string(width_) + "x" +
                                   std::to_string(height_) + " grid");
  return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(x);
}

double box_iou(const Box& a, const Box& b) {
  const int ix1 = std::max(a.x1, b.x1);
  const int iy1 = std::max(a.y1, b.y1);
  const int ix2 = std::min(a.x2, b.x2);
  const int iy2 = std::min(a.y2, b.y2);
  if (ix2 < ix1 || iy2 < iy1) return 0.0;
  const long long inter =
      static_cast<long long>(ix2 - ix1 + 1) * static_cast<long long>(iy2 - iy1 + 1);
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

long long box_l1(const Box& a, const Box& b) {
  return std::abs(static_cast<long long>(a.x1) - b.x1) +
         std::abs(static_cast<long long>(a.y1) - b.y1) +
         std::abs(static_cast<long long>(a.x2) - b.x2) +
         std::abs(static_cast<long long>(a.y2) - b.y2);
}

long long point_l1(const PointXY& a, const PointXY& b) {
  return std::abs(static_cast<long long>(a.x) - b.x) +
         std::abs(static_cast<long long>(a.y) - b.y);
}

namespace {

void require_binary_nonempty(const MaskGrid& mask, const char* op) {
  if (!mask.is_binary()) throw Error("NonBinaryMask", std::string(op) + " requires a binary mask");
  if (mask.foreground_count() == 0)
    throw Error("EmptyMask", std::string(op) + ": no foreground pixel");
}

}  // namespace

Box mask_to_box(const MaskGrid& mask) {
  require_binary_nonempty(mask, "mask_to_box");
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0.0) continue;
      min_x = std::min(min_x, x);
      min_y = std::min(min_y, y);
      max_x = std::max(max_x, x);
      max_y = std::max(max_y, y);
    }
  }
  return Box(min_x, min_y, max_x, max_y);
}

PointXY mask_centroid(const MaskGrid& mask) {
  require_binary_nonempty(mask, "mask_centroid");
  long long sum_x = 0, sum_y = 0, count = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0.0) continue;
      sum_x += x;
      sum_y += y;
      ++count;
    }
  }
  // llround rounds halves away from zero; coordinates are nonnegative.
  const auto mean = [count](long long sum) {
    return static_cast<int>(std::llround(static_cast<double>(sum) / static_cast<double>(count)));
  };
  return PointXY(mean(sum_x), mean(sum_y));
}

MaskGrid rasterize_box(const Box& box, int width, int height) {
  if (width <= 0 || height <= 0) throw Error("InvalidMask", "nonpositive dimensions");
  if (box.x2 >= width || box.y2 >= height)
    throw Error("OutOfBounds", "box does not fit in " + std::to_string(width) + "x" +
                                   std::to_string(height) + " grid");
  MaskGrid mask(width, height, 0.0);
  for (int y = box.y1; y <= box.y2; ++y)
    for (int x = box.x1; x <= box.x2; ++x) mask.set(x, y, 1.0);
  return mask;
}

}  // namespace affrl
