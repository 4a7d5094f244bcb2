// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Noise removal ahead of ground filtering: a k-nearest-neighbour distance
// statistic for isolated outliers and DBSCAN for small isolated regions.
// All distances are full 3D Euclidean.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "roadex/cloud.hpp"

namespace roadex {

struct OutlierFilterParams {
  std::size_t k = 8;   ///< neighbours averaged per point (self excluded)
  double alpha = 2.0;  ///< half-width of the kept interval in standard deviations
};

struct DbscanParams {
  double eps = 2.0;          ///< neighbourhood radius, metres (inclusive)
  std::size_t min_pts = 10;  ///< neighbours within eps, self included, to be a core point
};

struct OutlierSplit {
  PointCloud kept;
  PointCloud removed;
  std::vector<std::size_t> kept_indices;     ///< ascending input indices
  std::vector<std::size_t> removed_indices;  ///< ascending input indices
};

/// Mean distance from every point to its k nearest other points.
std::vector<double> mean_neighbor_distances(const PointCloud& cloud, std::size_t k);

/// Removes point i iff its mean k-NN distance lies outside
/// [mu - alpha*sigma, mu + alpha*sigma], where mu and sigma are the mean and
/// population standard deviation over all points. Requires |cloud| > k.
OutlierSplit remove_statistical_outliers(const PointCloud& cloud, const OutlierFilterParams& params);

inline constexpr std::int32_t kNoise = -1;
using ClusterLabels = std::vector<std::int32_t>;

/// Density-based clustering. Core partitions do not depend on input order;
/// a border point joins the cluster of its nearest core neighbour (ties to
/// the lower index). Cluster ids are numbered by their lowest core index.
ClusterLabels dbscan(const PointCloud& cloud, const DbscanParams& params);

/// Ascending indices of points whose cluster has at least `min_size` members.
/// Noise is always dropped.
std::vector<std::size_t> large_cluster_indices(const ClusterLabels& labels, std::size_t min_size);

PointCloud drop_small_clusters(const PointCloud& cloud, const ClusterLabels& labels, std::size_t min_size);

}  // namespace roadex
