// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/spatial_index.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "roadex/errors.hpp"

namespace roadex {
namespace {

double scan_dist(const Point3& p, const Vec3& q, int dims) {
  const double dx = p.x - q.x, dy = p.y - q.y, dz = dims == 3 ? p.z - q.z : 0.0;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

TEST(SpatialIndex, SinglePointKnn) {
  const PointCloud c({{3, 4, 5}});
  const SpatialIndex idx(c, 3);
  const auto nn = idx.knn_query({-100, 7, 0}, 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_EQ(nn[0].index, 0u);
  EXPECT_EQ(idx.knn_query({0, 0, 0}, 5).size(), 1u);
}

TEST(SpatialIndex, GridRadiusIsInclusive) {
  std::vector<Point3> pts;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) pts.push_back({float(x), float(y), 0});
  const SpatialIndex idx(PointCloud(pts), 2);
  const auto hits = idx.radius_query({4, 4, 0}, 1.0);
  EXPECT_EQ(hits, (std::vector<std::size_t>{34, 43, 44, 45, 54}));
}

TEST(SpatialIndex, RadiusMatchesLinearScan) {
  std::mt19937_64 rng(17);
  for (int dims : {2, 3}) {
    const PointCloud c = testing::random_cloud(rng, 100, 1.0, 1.0);
    const SpatialIndex idx(c, dims);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int probe = 0; probe < 20; ++probe) {
      const Vec3 q{u(rng), u(rng), u(rng)};
      std::vector<std::size_t> ref;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (scan_dist(c[i], q, dims) <= 0.2) ref.push_back(i);
      }
      EXPECT_EQ(idx.radius_query(q, 0.2), ref);
      EXPECT_EQ(idx.count_in_radius(q, 0.2), ref.size());
      EXPECT_EQ(idx.count_in_radius(q, 0.2, 1), std::min<std::size_t>(ref.size(), 1));
    }
  }
}

TEST(SpatialIndex, KnnMatchesSortedScan) {
  std::mt19937_64 rng(23);
  const PointCloud c = testing::random_cloud(rng, 2000, 50.0, 5.0);
  const SpatialIndex idx(c, 3);
  std::uniform_real_distribution<double> u(-5.0, 55.0);
  for (int probe = 0; probe < 50; ++probe) {
    const Vec3 q{u(rng), u(rng), 2.0};
    std::vector<std::pair<double, std::size_t>> ref;
    for (std::size_t i = 0; i < c.size(); ++i) ref.emplace_back(scan_dist(c[i], q, 3), i);
    std::sort(ref.begin(), ref.end());
    const auto nn = idx.knn_query(q, 9);
    ASSERT_EQ(nn.size(), 9u);
    for (std::size_t k = 0; k < 9; ++k) {
      EXPECT_EQ(nn[k].index, ref[k].second);
      EXPECT_DOUBLE_EQ(nn[k].distance, ref[k].first);
    }
    EXPECT_EQ(idx.nearest(q).index, ref[0].second);
  }
}

TEST(SpatialIndex, DuplicatePointsTieByIndex) {
  const PointCloud c(std::vector<Point3>(50, Point3{1, 1, 1}));
  const SpatialIndex idx(c, 3);
  const auto nn = idx.knn_query({0, 0, 0}, 5);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(nn[k].index, k);
  EXPECT_EQ(idx.radius_query({1, 1, 1}, 0.0).size(), 50u);
}

TEST(SpatialIndex, RejectsBadInput) {
  EXPECT_THROW(SpatialIndex(PointCloud{}, 3), ParameterError);
  EXPECT_THROW(SpatialIndex(PointCloud({{0, 0, 0}}), 4), ParameterError);
}

}  // namespace
}  // namespace roadex
