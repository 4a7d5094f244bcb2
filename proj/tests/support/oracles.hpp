// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Slow reference implementations used to check the library. Everything here
// is a direct O(n^2) reading of the definitions with no shared code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "roadex/cloud.hpp"
#include "roadex/raster.hpp"

namespace roadex::testing {

inline double dist3(const Point3& a, const Point3& b) {
  const double dx = static_cast<double>(a.x) - b.x;
  const double dy = static_cast<double>(a.y) - b.y;
  const double dz = static_cast<double>(a.z) - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double extent, double z_extent) {
  std::uniform_real_distribution<double> xy(0.0, extent);
  std::uniform_real_distribution<double> z(0.0, z_extent);
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({static_cast<float>(xy(rng)), static_cast<float>(xy(rng)), static_cast<float>(z(rng))});
  }
  return PointCloud(std::move(pts));
}

/// Points in a few gaussian blobs plus uniform background.
inline PointCloud clustered_cloud(std::mt19937_64& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::normal_distribution<double> g(0.0, 0.6);
  std::uniform_int_distribution<int> nblobs(1, 4);
  std::vector<Point3> centres(static_cast<std::size_t>(nblobs(rng)));
  for (auto& c : centres) c = {static_cast<float>(u(rng)), static_cast<float>(u(rng)), 0.0f};
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 5 == 0) {
      pts.push_back({static_cast<float>(u(rng)), static_cast<float>(u(rng)), static_cast<float>(g(rng))});
    } else {
      const Point3& c = centres[i % centres.size()];
      pts.push_back({static_cast<float>(c.x + g(rng)), static_cast<float>(c.y + g(rng)), static_cast<float>(g(rng))});
    }
  }
  return PointCloud(std::move(pts));
}

/// Voxel grid by map over integer keys; centroid accumulated in double.
inline PointCloud voxel_oracle(const PointCloud& cloud, double voxel) {
  if (cloud.empty()) return {};
  double mx = cloud[0].x, my = cloud[0].y, mz = cloud[0].z;
  for (const auto& p : cloud) {
    mx = std::min<double>(mx, p.x);
    my = std::min<double>(my, p.y);
    mz = std::min<double>(mz, p.z);
  }
  std::map<std::tuple<long, long, long>, std::tuple<double, double, double, std::size_t>> cells;
  for (const auto& p : cloud) {
    const auto key = std::make_tuple(static_cast<long>(std::floor((p.x - mx) / voxel)),
                                     static_cast<long>(std::floor((p.y - my) / voxel)),
                                     static_cast<long>(std::floor((p.z - mz) / voxel)));
    auto& [sx, sy, sz, n] = cells[key];
    sx += p.x;
    sy += p.y;
    sz += p.z;
    ++n;
  }
  std::vector<Point3> out;
  for (const auto& [key, acc] : cells) {
    const auto& [sx, sy, sz, n] = acc;
    const double d = static_cast<double>(n);
    out.push_back({static_cast<float>(sx / d), static_cast<float>(sy / d), static_cast<float>(sz / d)});
  }
  return PointCloud(std::move(out));
}

struct IoUOracle {
  std::size_t n1 = 0, n2 = 0, matched1 = 0, matched2 = 0, intersection = 0, union_count = 0;
  double iou = 0.0;
};

/// Downsample both, match every point against every other, take the
/// smaller matched count as the intersection.
inline IoUOracle iou_oracle(const PointCloud& a, const PointCloud& b, double voxel, double threshold) {
  const PointCloud d1 = voxel_oracle(a, voxel);
  const PointCloud d2 = voxel_oracle(b, voxel);
  const auto matched = [threshold](const PointCloud& x, const PointCloud& y) {
    std::size_t m = 0;
    for (const auto& p : x) {
      for (const auto& q : y) {
        if (dist3(p, q) <= threshold) {
          ++m;
          break;
        }
      }
    }
    return m;
  };
  IoUOracle r;
  r.n1 = d1.size();
  r.n2 = d2.size();
  r.matched1 = matched(d1, d2);
  r.matched2 = matched(d2, d1);
  r.intersection = std::min(r.matched1, r.matched2);
  r.union_count = r.n1 + r.n2 - r.intersection;
  r.iou = static_cast<double>(r.intersection) / static_cast<double>(r.union_count);
  return r;
}

/// Mean distance to the k nearest other points.
inline std::vector<double> mean_knn_oracle(const PointCloud& cloud, std::size_t k) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (j != i) d.push_back(dist3(cloud[i], cloud[j]));
    }
    std::sort(d.begin(), d.end());
    out.push_back(std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k));
  }
  return out;
}

/// Indices kept by the mean +- alpha * population-sigma rule.
inline std::vector<std::size_t> outlier_oracle(const PointCloud& cloud, std::size_t k, double alpha) {
  const auto m = mean_knn_oracle(cloud, k);
  const double mu = std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(m.size());
  double var = 0.0;
  for (double v : m) var += (v - mu) * (v - mu);
  const double sigma = std::sqrt(var / static_cast<double>(m.size()));
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] >= mu - alpha * sigma && m[i] <= mu + alpha * sigma) kept.push_back(i);
  }
  return kept;
}

struct DbscanOracle {
  std::vector<bool> core;
  std::vector<int> core_component;          ///< -1 for non-core
  std::vector<std::set<int>> border_options;  ///< components a non-core point may join
};

inline DbscanOracle dbscan_oracle(const PointCloud& cloud, double eps, std::size_t min_pts) {
  const std::size_t n = cloud.size();
  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist3(cloud[i], cloud[j]) <= eps) nb[i].push_back(j);
    }
  }
  DbscanOracle r;
  r.core.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.core[i] = nb[i].size() >= min_pts;
  r.core_component.assign(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.core[i] || r.core_component[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    r.core_component[i] = next;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      for (std::size_t j : nb[c]) {
        if (r.core[j] && r.core_component[j] < 0) {
          r.core_component[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  r.border_options.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.core[i]) continue;
    for (std::size_t j : nb[i]) {
      if (r.core[j]) r.border_options[i].insert(r.core_component[j]);
    }
  }
  return r;
}

/// 8-connected component count by flood fill.
inline std::size_t components_oracle(const Raster& r) {
  std::vector<char> seen(r.size(), 0);
  std::size_t count = 0;
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      if (r.at(x, y) == 0.0 || seen[static_cast<std::size_t>(y * r.width() + x)]) continue;
      ++count;
      std::vector<Pixel> stack{{x, y}};
      seen[static_cast<std::size_t>(y * r.width() + x)] = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = p.x + dx, qy = p.y + dy;
            if (!r.in_bounds(qx, qy) || r.at(qx, qy) == 0.0) continue;
            auto& s = seen[static_cast<std::size_t>(qy * r.width() + qx)];
            if (!s) {
              s = 1;
              stack.push_back({qx, qy});
            }
          }
        }
      }
    }
  }
  return count;
}

/// Random blob raster: union of discs and thick segments.
inline Raster random_blobs(std::mt19937_64& rng, int max_side) {
  std::uniform_int_distribution<int> side(24, max_side);
  const int w = side(rng), h = side(rng);
  Georef g;
  g.width = w;
  g.height = h;
  Raster r(g);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), rad(1.5, std::min(w, h) / 5.0);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const double cx = ux(rng), cy = uy(rng), cr = rad(rng);
    const double ex = ux(rng), ey = uy(rng);
    const bool segment = i % 2 == 1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double d;
        if (segment) {
          const double vx = ex - cx, vy = ey - cy;
          const double l2 = vx * vx + vy * vy;
          const double t = l2 > 0 ? std::clamp(((x - cx) * vx + (y - cy) * vy) / l2, 0.0, 1.0) : 0.0;
          d = std::hypot(x - cx - t * vx, y - cy - t * vy);
        } else {
          d = std::hypot(x - cx, y - cy);
        }
        if (d <= cr) r.at(x, y) = 1.0;
      }
    }
  }
  return r;
}

inline Raster raster_from(const std::vector<std::string>& rows) {
  Georef g;
  g.height = static_cast<int>(rows.size());
  g.width = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  Raster r(g);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) r.at(x, y) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  }
  return r;
}

inline Raster blank(int w, int h) {
  Georef g;
  g.width = w;
  g.height = h;
  return Raster(g);
}

}  // namespace roadex::testing
