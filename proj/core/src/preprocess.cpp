// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/preprocess.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "roadex/errors.hpp"
#include "roadex/parallel.hpp"
#include "roadex/spatial_index.hpp"

namespace roadex {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<double> mean_neighbor_distances(const PointCloud& cloud, std::size_t k) {
  if (k == 0) throw ParameterError("outlier filter: k must be at least 1");
  if (cloud.size() <= k) throw ParameterError("outlier filter: cloud must have more than k points");
  const SpatialIndex index(cloud, 3);
  std::vector<double> means(cloud.size());
  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto nn = index.knn_query(to_vec3(cloud[i]), k + 1);
      double sum = 0.0;
      std::size_t used = 0;
      bool skipped_self = false;
      for (const Neighbor& n : nn) {
        if (!skipped_self && n.index == i) {
          skipped_self = true;
          continue;
        }
        if (used == k) break;
        sum += n.distance;
        ++used;
      }
      means[i] = sum / static_cast<double>(used);
    }
  });
  return means;
}

OutlierSplit remove_statistical_outliers(const PointCloud& cloud, const OutlierFilterParams& params) {
  if (!(params.alpha > 0.0)) throw ParameterError("outlier filter: alpha must be positive");
  const std::vector<double> means = mean_neighbor_distances(cloud, params.k);

  const double n = static_cast<double>(means.size());
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / n;
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  const double sigma = std::sqrt(var / n);
  const double lo = mu - params.alpha * sigma;
  const double hi = mu + params.alpha * sigma;

  OutlierSplit split;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] < lo || means[i] > hi) {
      split.removed_indices.push_back(i);
    } else {
      split.kept_indices.push_back(i);
    }
  }
  split.kept = cloud.select(split.kept_indices);
  split.removed = cloud.select(split.removed_indices);
  return split;
}

ClusterLabels dbscan(const PointCloud& cloud, const DbscanParams& params) {
  if (!(params.eps > 0.0)) throw ParameterError("dbscan: eps must be positive");
  if (params.min_pts == 0) throw ParameterError("dbscan: min_pts must be at least 1");
  ClusterLabels labels(cloud.size(), kNoise);
  if (cloud.empty()) return labels;

  const SpatialIndex index(cloud, 3);
  std::vector<std::uint8_t> core(cloud.size(), 0);
  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      core[i] = index.count_in_radius(to_vec3(cloud[i]), params.eps, params.min_pts) >= params.min_pts;
    }
  });

  DisjointSets sets(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!core[i]) continue;
    index.for_each_in_radius(to_vec3(cloud[i]), params.eps, [&](std::size_t j, double) {
      if (j > i && core[j]) sets.unite(i, j);
    });
  }

  std::vector<std::int32_t> root_label(cloud.size(), kNoise);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!core[i]) continue;
    const std::size_t root = sets.find(i);
    if (root_label[root] == kNoise) root_label[root] = next++;
    labels[i] = root_label[root];
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    index.for_each_in_radius(to_vec3(cloud[i]), params.eps, [&](std::size_t j, double d2) {
      if (!core[j]) return;
      if (d2 < best || (d2 == best && j < best_j)) {
        best = d2;
        best_j = j;
      }
    });
    if (std::isfinite(best)) labels[i] = labels[best_j];
  }
  return labels;
}

std::vector<std::size_t> large_cluster_indices(const ClusterLabels& labels, std::size_t min_size) {
  std::int32_t max_label = -1;
  for (std::int32_t l : labels) max_label = std::max(max_label, l);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(max_label + 1), 0);
  for (std::int32_t l : labels) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::int32_t l = labels[i];
    if (l >= 0 && sizes[static_cast<std::size_t>(l)] >= min_size) keep.push_back(i);
  }
  return keep;
}

PointCloud drop_small_clusters(const PointCloud& cloud, const ClusterLabels& labels, std::size_t min_size) {
  if (labels.size() != cloud.size()) {
    throw ParameterError("drop_small_clusters: label count does not match cloud size");
  }
  return cloud.select(large_cluster_indices(labels, min_size));
}

}  // namespace roadex
