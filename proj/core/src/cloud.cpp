// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "roadex/errors.hpp"

namespace roadex {

PointCloud::PointCloud(std::vector<Point3> points, std::vector<float> intensity)
    : points_(std::move(points)), intensity_(std::move(intensity)) {
  if (!intensity_.empty() && intensity_.size() != points_.size()) {
    throw ParameterError("intensity length does not match point count");
  }
}

void PointCloud::reserve(std::size_t n) {
  points_.reserve(n);
  if (has_intensity()) intensity_.reserve(n);
}

void PointCloud::push_back(const Point3& p) {
  points_.push_back(p);
  if (has_intensity()) intensity_.push_back(0.0f);
}

void PointCloud::push_back(const Point3& p, float intensity) {
  if (!has_intensity() && !points_.empty()) intensity_.assign(points_.size(), 0.0f);
  points_.push_back(p);
  intensity_.push_back(intensity);
}

void PointCloud::append(const PointCloud& other) {
  if (other.has_intensity() || has_intensity()) {
    if (!has_intensity()) intensity_.assign(points_.size(), 0.0f);
    if (other.has_intensity()) {
      intensity_.insert(intensity_.end(), other.intensity_.begin(), other.intensity_.end());
    } else {
      intensity_.insert(intensity_.end(), other.size(), 0.0f);
    }
  }
  points_.insert(points_.end(), other.points_.begin(), other.points_.end());
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.points_.reserve(indices.size());
  for (std::size_t i : indices) out.points_.push_back(points_[i]);
  if (has_intensity()) {
    out.intensity_.reserve(indices.size());
    for (std::size_t i : indices) out.intensity_.push_back(intensity_[i]);
  }
  return out;
}

BoundingBox2D bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw ParameterError("bounding_box: empty cloud");
  BoundingBox2D box{cloud[0].x, cloud[0].x, cloud[0].y, cloud[0].y};
  for (const Point3& p : cloud) {
    box.x_min = std::min<double>(box.x_min, p.x);
    box.x_max = std::max<double>(box.x_max, p.x);
    box.y_min = std::min<double>(box.y_min, p.y);
    box.y_max = std::max<double>(box.y_max, p.y);
  }
  return box;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0) || !std::isfinite(voxel)) {
    throw ParameterError("voxel_downsample: voxel size must be positive");
  }
  if (cloud.empty()) return {};

  std::array<double, 3> lo{cloud[0].x, cloud[0].y, cloud[0].z};
  for (const Point3& p : cloud) {
    lo[0] = std::min<double>(lo[0], p.x);
    lo[1] = std::min<double>(lo[1], p.y);
    lo[2] = std::min<double>(lo[2], p.z);
  }

  using Key = std::array<std::int64_t, 3>;
  std::vector<Key> keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud[i];
    keys[i] = {static_cast<std::int64_t>(std::floor((p.x - lo[0]) / voxel)),
               static_cast<std::int64_t>(std::floor((p.y - lo[1]) / voxel)),
               static_cast<std::int64_t>(std::floor((p.z - lo[2]) / voxel))};
  }
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so members of a voxel are summed in input order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::vector<Point3> out;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t e = g;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    while (e < order.size() && keys[order[e]] == keys[order[g]]) {
      const Point3& p = cloud[order[e]];
      sx += p.x;
      sy += p.y;
      sz += p.z;
      ++e;
    }
    const double n = static_cast<double>(e - g);
    out.push_back({static_cast<float>(sx / n), static_cast<float>(sy / n),
                   static_cast<float>(sz / n)});
    g = e;
  }
  return PointCloud(std::move(out));
}

}  // namespace roadex
