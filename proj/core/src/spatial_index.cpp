// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "roadex/errors.hpp"

namespace roadex {
namespace {
constexpr std::uint32_t kLeafSize = 16;
}

SpatialIndex::SpatialIndex(const PointCloud& cloud, int dims) : dims_(dims) {
  if (dims != 2 && dims != 3) throw ParameterError("spatial index dims must be 2 or 3");
  if (cloud.empty()) throw ParameterError("cannot build a spatial index over an empty cloud");
  if (cloud.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError("cloud too large for spatial index");
  }
  coords_.resize(cloud.size());
  ids_.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    coords_[i] = {cloud[i].x, cloud[i].y, cloud[i].z};
    ids_[i] = i;
  }
  nodes_.reserve(2 * cloud.size() / kLeafSize + 2);
  // Partition ids_ against the cloud-ordered coordinates, then lay the
  // coordinates out in tree order for cache-friendly leaf scans.
  build(0, static_cast<std::uint32_t>(cloud.size()));
  std::vector<std::array<float, 3>> ordered(coords_.size());
  for (std::size_t s = 0; s < ids_.size(); ++s) ordered[s] = coords_[ids_[s]];
  coords_ = std::move(ordered);
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, 0.0f, 0});
  if (end - begin <= kLeafSize) return id;

  std::array<float, 3> lo = coords_[ids_[begin]];
  std::array<float, 3> hi = lo;
  for (std::uint32_t s = begin; s < end; ++s) {
    const auto& c = coords_[ids_[s]];
    for (int a = 0; a < dims_; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < dims_; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     if (coords_[a][axis] != coords_[b][axis]) return coords_[a][axis] < coords_[b][axis];
                     return a < b;
                   });
  nodes_[id].axis = static_cast<std::uint8_t>(axis);
  nodes_[id].split = coords_[ids_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::size_t> SpatialIndex::radius_query(const Vec3& q, double r) const {
  std::vector<std::size_t> out;
  radius_query(q, r, out);
  return out;
}

void SpatialIndex::radius_query(const Vec3& q, double r, std::vector<std::size_t>& out) const {
  out.clear();
  for_each_in_radius(q, r, [&](std::size_t i, double) { out.push_back(i); });
  std::sort(out.begin(), out.end());
}

std::size_t SpatialIndex::count_in_radius(const Vec3& q, double r, std::size_t limit) const {
  if (limit == 0) return 0;
  const std::array<double, 3> qa{q.x, q.y, q.z};
  const double r2 = r * r;
  std::size_t count = 0;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.left < 0) {
      for (std::uint32_t s = node.begin; s < node.end; ++s) {
        if (dist2(s, qa) <= r2 && ++count >= limit) return count;
      }
      continue;
    }
    const double diff = qa[node.axis] - static_cast<double>(node.split);
    if (diff - r <= 0.0) stack[top++] = node.left;
    if (diff + r >= 0.0) stack[top++] = node.right;
  }
  return count;
}

std::vector<Neighbor> SpatialIndex::knn_query(const Vec3& q, std::size_t k) const {
  std::vector<Neighbor> result;
  if (k == 0) return result;
  const std::array<double, 3> qa{q.x, q.y, q.z};

  // Max-heap on (d2, index): the top is the current worst candidate.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;

  struct Pending {
    std::int32_t node;
    double bound;
  };
  std::vector<Pending> stack;
  stack.push_back({0, 0.0});
  while (!stack.empty()) {
    const Pending item = stack.back();
    stack.pop_back();
    if (heap.size() == k && item.bound > heap.top().first) continue;
    const Node& node = nodes_[item.node];
    if (node.left < 0) {
      for (std::uint32_t s = node.begin; s < node.end; ++s) {
        const Entry e{dist2(s, qa), ids_[s]};
        if (heap.size() < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
      continue;
    }
    const double diff = qa[node.axis] - static_cast<double>(node.split);
    const double plane2 = diff * diff;
    // Visit the near side first (pushed last).
    if (diff <= 0.0) {
      stack.push_back({node.right, std::max(item.bound, plane2)});
      stack.push_back({node.left, item.bound});
    } else {
      stack.push_back({node.left, std::max(item.bound, plane2)});
      stack.push_back({node.right, item.bound});
    }
  }
  result.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    result[i] = {heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return result;
}

Neighbor SpatialIndex::nearest(const Vec3& q) const { return knn_query(q, 1).front(); }

SpatialIndex build_index(const PointCloud& cloud, int dims) { return SpatialIndex(cloud, dims); }

}  // namespace roadex
