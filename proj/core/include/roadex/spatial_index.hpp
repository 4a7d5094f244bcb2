// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Immutable k-d tree over the XY or XYZ coordinates of a point cloud.
//
// Radius queries are boundary inclusive (distance <= r). Distances are
// evaluated in double precision from the stored single precision
// coordinates, so results match a linear scan that does the same. k-NN
// results are ordered by (distance, index), which makes ties deterministic.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "roadex/cloud.hpp"

namespace roadex {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class SpatialIndex {
 public:
  /// `dims` is 2 (XY) or 3 (XYZ). Throws ParameterError on an empty cloud.
  SpatialIndex(const PointCloud& cloud, int dims);

  int dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return ids_.size(); }

  /// Indices within distance r of q, ascending.
  std::vector<std::size_t> radius_query(const Vec3& q, double r) const;
  void radius_query(const Vec3& q, double r, std::vector<std::size_t>& out) const;

  /// Invokes fn(index, squared_distance) for every point within r of q.
  template <typename Fn>
  void for_each_in_radius(const Vec3& q, double r, Fn&& fn) const;

  /// Number of points within r of q, stopping once `limit` is reached.
  std::size_t count_in_radius(const Vec3& q, double r,
                              std::size_t limit = std::numeric_limits<std::size_t>::max()) const;

  /// The k nearest points ordered by (distance, index). Returns fewer when
  /// the cloud is smaller than k.
  std::vector<Neighbor> knn_query(const Vec3& q, std::size_t k) const;

  Neighbor nearest(const Vec3& q) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    float split = 0.0f;
    std::uint8_t axis = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double dist2(std::size_t slot, const std::array<double, 3>& q) const {
    double s = 0.0;
    for (int a = 0; a < dims_; ++a) {
      const double d = static_cast<double>(coords_[slot][a]) - q[a];
      s += d * d;
    }
    return s;
  }

  int dims_;
  std::vector<std::array<float, 3>> coords_;  // tree order
  std::vector<std::size_t> ids_;              // tree order -> cloud index
  std::vector<Node> nodes_;
};

SpatialIndex build_index(const PointCloud& cloud, int dims);

template <typename Fn>
void SpatialIndex::for_each_in_radius(const Vec3& q, double r, Fn&& fn) const {
  if (nodes_.empty() || !(r >= 0.0)) return;
  const std::array<double, 3> qa{q.x, q.y, q.z};
  const double r2 = r * r;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.left < 0) {
      for (std::uint32_t s = node.begin; s < node.end; ++s) {
        const double d2 = dist2(s, qa);
        if (d2 <= r2) fn(ids_[s], d2);
      }
      continue;
    }
    const double diff = qa[node.axis] - static_cast<double>(node.split);
    if (diff - r <= 0.0) stack[top++] = node.left;
    if (diff + r >= 0.0) stack[top++] = node.right;
  }
}

}  // namespace roadex
