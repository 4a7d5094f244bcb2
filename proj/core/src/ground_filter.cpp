// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/ground_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "roadex/errors.hpp"
#include "roadex/parallel.hpp"

namespace roadex {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Fit {
  PlaneModel plane;
  std::vector<std::size_t> inliers;  // positions within the fitted subset
};

// RANSAC over points[subset[*]]. Coordinates are centred on the subset
// centroid for conditioning; the returned offset is in world coordinates.
Fit ransac_subset(const PointCloud& points, const std::vector<std::size_t>& subset, double distance,
                  std::size_t iters, std::uint64_t seed) {
  const std::size_t n = subset.size();
  if (n < 3) throw FitError("ransac: need at least 3 points");

  double cx = 0.0, cy = 0.0, cz = 0.0;
  for (std::size_t i : subset) {
    cx += points[i].x;
    cy += points[i].y;
    cz += points[i].z;
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  cz /= static_cast<double>(n);
  std::vector<std::array<double, 3>> c(n);
  double extent = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point3& p = points[subset[k]];
    c[k] = {p.x - cx, p.y - cy, p.z - cz};
    extent = std::max({extent, std::abs(c[k][0]), std::abs(c[k][1]), std::abs(c[k][2])});
  }
  const double degenerate = 1e-12 * std::max(1.0, extent * extent);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  bool found = false;
  std::size_t best_count = 0;
  std::array<double, 3> best_n{0.0, 0.0, 1.0};
  double best_d = 0.0;

  for (std::size_t it = 0; it < iters; ++it) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    std::size_t d = pick(rng);
    if (a == b || a == d || b == d) continue;
    const auto& pa = c[a];
    const auto& pb = c[b];
    const auto& pd = c[d];
    const std::array<double, 3> u{pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]};
    const std::array<double, 3> v{pd[0] - pa[0], pd[1] - pa[1], pd[2] - pa[2]};
    std::array<double, 3> nrm{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
    if (len <= degenerate) continue;
    for (double& x : nrm) x /= len;
    // Canonical orientation: nz >= 0, and for vertical planes the first
    // nonzero horizontal component positive.
    const bool flip = nrm[2] < 0.0 || (nrm[2] == 0.0 && (nrm[0] < 0.0 || (nrm[0] == 0.0 && nrm[1] < 0.0)));
    if (flip) {
      for (double& x : nrm) x = -x;
    }
    const double off = -(nrm[0] * pa[0] + nrm[1] * pa[1] + nrm[2] * pa[2]);
    std::size_t count = 0;
    for (const auto& p : c) {
      if (std::abs(nrm[0] * p[0] + nrm[1] * p[1] + nrm[2] * p[2] + off) <= distance) ++count;
    }
    if (!found || count > best_count) {
      found = true;
      best_count = count;
      best_n = nrm;
      best_d = off;
    }
  }
  if (!found) throw FitError("ransac: all samples degenerate");

  Fit fit;
  fit.plane.normal = best_n;
  fit.plane.d = best_d - (best_n[0] * cx + best_n[1] * cy + best_n[2] * cz);
  fit.plane.inlier_count = best_count;
  fit.plane.inlier_ratio = static_cast<double>(best_count) / static_cast<double>(n);
  fit.inliers.reserve(best_count);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = c[k];
    if (std::abs(best_n[0] * p[0] + best_n[1] * p[1] + best_n[2] * p[2] + best_d) <= distance) {
      fit.inliers.push_back(k);
    }
  }
  return fit;
}

double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace

std::string_view to_string(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::pure_plane: return "pure-plane";
    case ChunkKind::mixed: return "mixed";
    case ChunkKind::unordered: return "unordered";
    case ChunkKind::vertical: return "vertical";
  }
  return "unknown";
}

void validate(const GroundFilterParams& p) {
  if (!(p.chunk_size > 0.0)) throw ParameterError("chunk_size must be positive");
  if (!(p.ransac_distance > 0.0)) throw ParameterError("ransac_distance must be positive");
  if (p.ransac_iters == 0) throw ParameterError("ransac_iters must be positive");
  if (!(p.max_tilt_deg > 0.0 && p.max_tilt_deg < 90.0)) throw ParameterError("max_tilt_deg must be in (0, 90)");
  if (!(p.z_percentile > 0.0 && p.z_percentile < 1.0)) throw ParameterError("z_percentile must be in (0, 1)");
  if (!(p.z_band > 0.0)) throw ParameterError("z_band must be positive");
  if (!(p.min_inlier_ratio > 0.0 && p.min_inlier_ratio <= 1.0)) {
    throw ParameterError("min_inlier_ratio must be in (0, 1]");
  }
  if (!(p.min_mode_fraction > 0.0 && p.min_mode_fraction <= 1.0)) {
    throw ParameterError("min_mode_fraction must be in (0, 1]");
  }
  if (!(p.cleanup.eps > 0.0) || p.cleanup.min_pts == 0) throw ParameterError("invalid cleanup DBSCAN parameters");
}

std::vector<GridChunk> partition_grid(const PointCloud& cloud, double chunk_size) {
  if (!(chunk_size > 0.0)) throw ParameterError("partition_grid: chunk_size must be positive");
  if (cloud.empty()) throw ParameterError("partition_grid: empty cloud");
  const BoundingBox2D box = bounding_box(cloud);
  const auto cells_along = [&](double extent) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(extent / chunk_size)));
  };
  const std::size_t nx = cells_along(box.width());
  const std::size_t ny = cells_along(box.height());

  std::vector<std::pair<std::size_t, std::size_t>> keyed(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto ix = std::min(nx - 1, static_cast<std::size_t>(std::floor((cloud[i].x - box.x_min) / chunk_size)));
    const auto iy = std::min(ny - 1, static_cast<std::size_t>(std::floor((cloud[i].y - box.y_min) / chunk_size)));
    keyed[i] = {iy * nx + ix, i};
  }
  std::sort(keyed.begin(), keyed.end());

  std::vector<GridChunk> chunks;
  for (std::size_t g = 0; g < keyed.size();) {
    std::size_t e = g;
    while (e < keyed.size() && keyed[e].first == keyed[g].first) ++e;
    GridChunk chunk;
    chunk.cell_x = keyed[g].first % nx;
    chunk.cell_y = keyed[g].first / nx;
    chunk.cell.x_min = box.x_min + static_cast<double>(chunk.cell_x) * chunk_size;
    chunk.cell.y_min = box.y_min + static_cast<double>(chunk.cell_y) * chunk_size;
    chunk.cell.x_max = chunk.cell_x + 1 == nx ? box.x_max : chunk.cell.x_min + chunk_size;
    chunk.cell.y_max = chunk.cell_y + 1 == ny ? box.y_max : chunk.cell.y_min + chunk_size;
    chunk.indices.reserve(e - g);
    for (std::size_t k = g; k < e; ++k) chunk.indices.push_back(keyed[k].second);
    chunk.points = cloud.select(chunk.indices);
    chunk.bounds = bounding_box(chunk.points);
    chunks.push_back(std::move(chunk));
    g = e;
  }
  return chunks;
}

PlaneModel ransac_plane(const PointCloud& points, double distance, std::size_t iters, std::uint64_t seed) {
  if (!(distance > 0.0)) throw ParameterError("ransac: distance must be positive");
  std::vector<std::size_t> all(points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return ransac_subset(points, all, distance, iters, seed).plane;
}

double tilt_angle(const PlaneModel& plane) {
  const double nz = std::min(1.0, std::abs(plane.normal[2]));
  return std::acos(nz) * 180.0 / std::numbers::pi;
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk_index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk_index) + 1));
}

ChunkVerdict filter_chunk(const GridChunk& chunk, const GroundFilterParams& params, std::uint64_t seed) {
  const PointCloud& pts = chunk.points;
  ChunkVerdict verdict;
  const auto keep_subset = [&](std::vector<std::size_t> local) {
    std::sort(local.begin(), local.end());
    verdict.kept_indices = std::move(local);
    verdict.kept = pts.select(verdict.kept_indices);
  };

  std::vector<std::size_t> remaining(pts.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  if (pts.size() < 3) {
    verdict.kind = ChunkKind::unordered;
    keep_subset(remaining);
    return verdict;
  }

  const std::size_t min_remainder = std::max<std::size_t>(3, params.cleanup.min_pts);
  for (std::size_t attempt = 0;; ++attempt) {
    Fit fit;
    try {
      fit = ransac_subset(pts, remaining, params.ransac_distance, params.ransac_iters,
                          splitmix64(seed + attempt));
    } catch (const FitError&) {
      // Collinear or coincident remainder: too degenerate to judge.
      verdict.kind = ChunkKind::unordered;
      keep_subset(remaining);
      return verdict;
    }

    if (tilt_angle(fit.plane) > params.max_tilt_deg) {
      ++verdict.vertical_planes;
      const std::size_t left = remaining.size() - fit.inliers.size();
      if (verdict.vertical_planes >= params.max_vertical_planes || left < min_remainder) {
        verdict.kind = ChunkKind::vertical;
        return verdict;
      }
      std::vector<std::uint8_t> drop(remaining.size(), 0);
      for (std::size_t k : fit.inliers) drop[k] = 1;
      std::vector<std::size_t> next;
      next.reserve(left);
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        if (!drop[k]) next.push_back(remaining[k]);
      }
      remaining = std::move(next);
      continue;
    }

    if (fit.plane.inlier_ratio >= params.min_inlier_ratio) {
      verdict.kind = ChunkKind::pure_plane;
      std::vector<std::size_t> local;
      local.reserve(fit.inliers.size());
      for (std::size_t k : fit.inliers) local.push_back(remaining[k]);
      keep_subset(std::move(local));
      return verdict;
    }

    std::vector<double> z;
    z.reserve(remaining.size());
    for (std::size_t i : remaining) z.push_back(pts[i].z);
    const double cutoff = percentile(z, params.z_percentile) + params.z_band;
    std::vector<std::size_t> band;
    for (std::size_t i : remaining) {
      if (pts[i].z <= cutoff) band.push_back(i);
    }
    const double share = static_cast<double>(band.size()) / static_cast<double>(remaining.size());
    if (share >= params.min_mode_fraction) {
      verdict.kind = ChunkKind::mixed;
      keep_subset(std::move(band));
    } else {
      verdict.kind = ChunkKind::unordered;
      if (band.size() >= params.cleanup.min_pts) keep_subset(std::move(band));
    }
    return verdict;
  }
}

std::vector<std::size_t> filter_ground_indices(const PointCloud& cloud, const GroundFilterParams& params,
                                               std::uint64_t seed) {
  validate(params);
  const std::vector<GridChunk> chunks = partition_grid(cloud, params.chunk_size);
  std::vector<std::vector<std::size_t>> kept(chunks.size());
  parallel_for(
      chunks.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          const ChunkVerdict v = filter_chunk(chunks[c], params, chunk_seed(seed, c));
          kept[c].reserve(v.kept_indices.size());
          for (std::size_t local : v.kept_indices) kept[c].push_back(chunks[c].indices[local]);
        }
      },
      1);

  std::vector<std::size_t> merged;
  for (const auto& k : kept) merged.insert(merged.end(), k.begin(), k.end());
  std::sort(merged.begin(), merged.end());
  if (merged.empty()) return merged;

  const PointCloud candidates = cloud.select(merged);
  const ClusterLabels labels = dbscan(candidates, params.cleanup);
  std::vector<std::size_t> out;
  for (std::size_t k : large_cluster_indices(labels, params.cleanup.min_pts)) out.push_back(merged[k]);
  return out;
}

PointCloud filter_ground(const PointCloud& cloud, const GroundFilterParams& params, std::uint64_t seed) {
  return cloud.select(filter_ground_indices(cloud, params, seed));
}

PointCloud add_alignment_corners(const PointCloud& road, const BoundingBox2D& box, double z) {
  PointCloud out = road;
  const float fz = static_cast<float>(z);
  out.push_back({static_cast<float>(box.x_min), static_cast<float>(box.y_min), fz});
  out.push_back({static_cast<float>(box.x_max), static_cast<float>(box.y_min), fz});
  out.push_back({static_cast<float>(box.x_min), static_cast<float>(box.y_max), fz});
  out.push_back({static_cast<float>(box.x_max), static_cast<float>(box.y_max), fz});
  return out;
}

}  // namespace roadex
