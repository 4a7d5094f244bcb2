// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/preprocess.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "roadex/errors.hpp"

namespace roadex {
namespace {

PointCloud lattice(int n) {
  std::vector<Point3> pts;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) pts.push_back({float(x), float(y), 0});
  return PointCloud(pts);
}

PointCloud blob(std::mt19937_64& rng, Point3 c, double radius, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> pts;
  while (pts.size() < n) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z > 1.0) continue;
    pts.push_back({float(c.x + radius * x), float(c.y + radius * y), float(c.z + radius * z)});
  }
  return PointCloud(pts);
}

// Checks labels against the brute-force reference: core points partition
// exactly, border points join one of the clusters they touch, the rest is
// noise.
void expect_matches_oracle(const PointCloud& c, const ClusterLabels& labels, double eps, std::size_t min_pts) {
  const auto ref = testing::dbscan_oracle(c, eps, min_pts);
  std::map<int, std::int32_t> to_label;
  std::map<std::int32_t, int> to_component;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!ref.core[i]) continue;
    ASSERT_NE(labels[i], kNoise) << "core point " << i;
    const auto [a, fresh_a] = to_label.emplace(ref.core_component[i], labels[i]);
    const auto [b, fresh_b] = to_component.emplace(labels[i], ref.core_component[i]);
    EXPECT_EQ(a->second, labels[i]) << "core point " << i;
    EXPECT_EQ(b->second, ref.core_component[i]) << "core point " << i;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (ref.core[i]) continue;
    if (ref.border_options[i].empty()) {
      EXPECT_EQ(labels[i], kNoise) << "point " << i;
    } else {
      ASSERT_NE(labels[i], kNoise) << "border point " << i;
      EXPECT_TRUE(ref.border_options[i].count(to_component.at(labels[i]))) << "border point " << i;
    }
  }
}

TEST(MeanNeighborDistance, MatchesSortedScan) {
  std::mt19937_64 rng(4);
  const PointCloud c = testing::random_cloud(rng, 300, 10.0, 2.0);
  const auto got = mean_neighbor_distances(c, 6);
  const auto ref = testing::mean_knn_oracle(c, 6);
  ASSERT_EQ(got.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);
}

TEST(OutlierFilter, LatticeFollowsDefinition) {
  // The four corners have a visibly larger mean 4-NN distance than the rest
  // and fall outside mu +- 2 sigma; whatever the definition keeps, the
  // filter must keep.
  const PointCloud c = lattice(10);
  const auto split = remove_statistical_outliers(c, {4, 2.0});
  EXPECT_EQ(split.kept_indices, testing::outlier_oracle(c, 4, 2.0));
  EXPECT_EQ(split.removed_indices, (std::vector<std::size_t>{0, 9, 90, 99}));
}

TEST(OutlierFilter, FarPointRemoved) {
  PointCloud c = lattice(10);
  c.push_back({1000, 1000, 1000});
  const auto split = remove_statistical_outliers(c, {4, 2.0});
  EXPECT_EQ(split.kept_indices, testing::outlier_oracle(c, 4, 2.0));
  EXPECT_EQ(split.removed_indices, (std::vector<std::size_t>{100}));
  EXPECT_EQ(split.kept.size() + split.removed.size(), c.size());
}

TEST(OutlierFilter, HugeAlphaKeepsAll) {
  std::mt19937_64 rng(9);
  PointCloud c = testing::random_cloud(rng, 200, 10.0, 10.0);
  c.push_back({1e4, 1e4, 1e4});
  EXPECT_TRUE(remove_statistical_outliers(c, {8, 1e12}).removed.empty());
}

TEST(OutlierFilter, RandomCloudsMatchOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud c = testing::clustered_cloud(rng, 250, 20.0);
    EXPECT_EQ(remove_statistical_outliers(c, {8, 1.5}).kept_indices, testing::outlier_oracle(c, 8, 1.5));
  }
}

TEST(OutlierFilter, Preconditions) {
  EXPECT_THROW(remove_statistical_outliers(lattice(2), {4, 2.0}), ParameterError);
  EXPECT_THROW(remove_statistical_outliers(lattice(5), {4, 0.0}), ParameterError);
}

TEST(Dbscan, TwoDistantBlobs) {
  std::mt19937_64 rng(1);
  PointCloud c = blob(rng, {0, 0, 0}, 0.5, 20);
  c.append(blob(rng, {100, 0, 0}, 0.5, 20));
  const auto labels = dbscan(c, {2.0, 10});
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(labels[i], 0);
  for (std::size_t i = 20; i < 40; ++i) EXPECT_EQ(labels[i], 1);
}

TEST(Dbscan, TooFewPointsIsAllNoise) {
  const PointCloud c({{0, 0, 0}, {0.1f, 0, 0}, {0.2f, 0, 0}, {0.3f, 0, 0}, {0.4f, 0, 0}});
  for (auto l : dbscan(c, {2.0, 10})) EXPECT_EQ(l, kNoise);
}

TEST(Dbscan, OneDenseBlob) {
  std::mt19937_64 rng(2);
  const auto labels = dbscan(blob(rng, {5, 5, 5}, 1.0, 50), {2.0, 10});
  for (auto l : labels) EXPECT_EQ(l, 0);
}

TEST(Dbscan, RandomCloudsMatchOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> size(20, 300);
  for (int trial = 0; trial < 50; ++trial) {
    const PointCloud c = testing::clustered_cloud(rng, size(rng), 15.0);
    expect_matches_oracle(c, dbscan(c, {1.0, 5}), 1.0, 5);
  }
}

TEST(Dbscan, CorePartitionIgnoresOrder) {
  std::mt19937_64 rng(13);
  const PointCloud c = testing::clustered_cloud(rng, 300, 15.0);
  std::vector<std::size_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const PointCloud shuffled = c.select(perm);
  expect_matches_oracle(shuffled, dbscan(shuffled, {1.0, 5}), 1.0, 5);
}

TEST(Dbscan, ClusterIdsFollowFirstCore) {
  std::mt19937_64 rng(3);
  PointCloud c = blob(rng, {100, 0, 0}, 0.5, 15);
  c.append(blob(rng, {0, 0, 0}, 0.5, 15));
  const auto labels = dbscan(c, {2.0, 10});
  EXPECT_EQ(labels.front(), 0);
  EXPECT_EQ(labels.back(), 1);
}

TEST(Dbscan, RejectsBadParams) {
  EXPECT_THROW(dbscan(lattice(3), {0.0, 10}), ParameterError);
  EXPECT_THROW(dbscan(lattice(3), {1.0, 0}), ParameterError);
}

TEST(SmallClusters, KeepsLargeOnly) {
  ClusterLabels l(30, 0);
  l.insert(l.end(), 5, kNoise);
  EXPECT_EQ(large_cluster_indices(l, 10).size(), 30u);
  EXPECT_TRUE(large_cluster_indices(ClusterLabels(7, kNoise), 1).empty());
  ClusterLabels two(30, 0);
  two.insert(two.end(), 9, 1);
  const auto kept = large_cluster_indices(two, 10);
  EXPECT_EQ(kept.size(), 30u);
  EXPECT_EQ(kept.back(), 29u);
}

TEST(SmallClusters, DropFromCloud) {
  const PointCloud c = lattice(3);
  const ClusterLabels l{0, 0, 0, 1, kNoise, 0, 0, 1, 0};
  const auto out = drop_small_clusters(c, l, 3);
  EXPECT_EQ(out.size(), 6u);
  EXPECT_THROW(drop_small_clusters(c, ClusterLabels(3, 0), 1), ParameterError);
  EXPECT_TRUE(drop_small_clusters(c, ClusterLabels(9, kNoise), 1).empty());
}

}  // namespace
}  // namespace roadex
