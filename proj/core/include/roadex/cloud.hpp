// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Core geometric types: points, clouds, 2D boxes and voxel downsampling.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace roadex {

/// A stored LiDAR return. Coordinates are single precision to match the
/// on-disk PLY layout; arithmetic on them is done in double.
struct Point3 {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 to_vec3(const Point3& p) { return {p.x, p.y, p.z}; }

struct BoundingBox2D {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  friend bool operator==(const BoundingBox2D&, const BoundingBox2D&) = default;
};

/// Ordered point set with optional per-point intensity. Iteration order is
/// the insertion order and is never changed by the library.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points) : points_(std::move(points)) {}
  /// `intensity` must be empty or have one entry per point.
  PointCloud(std::vector<Point3> points, std::vector<float> intensity);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  std::span<const Point3> points() const noexcept { return points_; }
  bool has_intensity() const noexcept { return !intensity_.empty(); }
  std::span<const float> intensity() const noexcept { return intensity_; }

  void reserve(std::size_t n);
  void push_back(const Point3& p);
  void push_back(const Point3& p, float intensity);
  void append(const PointCloud& other);

  /// Sub-cloud made of the given indices, in the given order.
  PointCloud select(std::span<const std::size_t> indices) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point3> points_;
  std::vector<float> intensity_;
};

/// Tight XY box over all points. Throws ParameterError on an empty cloud.
BoundingBox2D bounding_box(const PointCloud& cloud);

/// Replaces all points sharing a voxel with their centroid. Voxel keys are
/// floor((p - min_corner) / voxel) per axis; output is ordered by key.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

}  // namespace roadex
