// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Grid-based ground extraction. The cloud is cut into square XY chunks
// (original Z kept), a plane is fitted per chunk with RANSAC, steep planes
// are discarded as vertical structure and the remaining points are kept
// according to an adaptive Z-percentile threshold.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "roadex/cloud.hpp"
#include "roadex/preprocess.hpp"

namespace roadex {

struct GridChunk {
  std::size_t cell_x = 0;
  std::size_t cell_y = 0;
  BoundingBox2D cell;                ///< grid cell; cells tile the cloud's box
  BoundingBox2D bounds;              ///< tight box over the members
  std::vector<std::size_t> indices;  ///< ascending indices into the source cloud
  PointCloud points;
};

/// Cells are chunk_size squares anchored at the cloud's min corner. A point
/// on an interior cell boundary goes to the higher cell; the last row and
/// column are closed. Empty cells are omitted; chunks are row-major.
std::vector<GridChunk> partition_grid(const PointCloud& cloud, double chunk_size);

/// Plane n.p + d = 0 with unit normal and nz >= 0.
struct PlaneModel {
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double d = 0.0;
  double inlier_ratio = 0.0;
  std::size_t inlier_count = 0;

  double distance(const Point3& p) const {
    return normal[0] * p.x + normal[1] * p.y + normal[2] * p.z + d;
  }
};

/// Returns the three-point sample plane with the most inliers
/// (|n.p + d| <= distance). Deterministic for a fixed seed. Throws FitError
/// for fewer than 3 points or when every sample is degenerate.
PlaneModel ransac_plane(const PointCloud& points, double distance, std::size_t iters, std::uint64_t seed);

/// Angle between the plane and the horizontal, degrees in [0, 90].
double tilt_angle(const PlaneModel& plane);

enum class ChunkKind { pure_plane, mixed, unordered, vertical };

std::string_view to_string(ChunkKind kind);

struct GroundFilterParams {
  double chunk_size = 10.0;        ///< metres
  double ransac_distance = 0.30;   ///< metres
  std::size_t ransac_iters = 200;
  double max_tilt_deg = 60.0;      ///< planes steeper than this are vertical
  double z_percentile = 0.10;      ///< fraction
  double z_band = 0.30;            ///< metres above the percentile
  double min_inlier_ratio = 0.8;   ///< pure-plane cutoff
  double min_mode_fraction = 0.25; ///< low-Z band share that makes a chunk "mixed"
  std::size_t max_vertical_planes = 3;
  DbscanParams cleanup{};          ///< trailing pass over the concatenated result
};

void validate(const GroundFilterParams& params);

struct ChunkVerdict {
  ChunkKind kind = ChunkKind::unordered;
  PointCloud kept;
  std::vector<std::size_t> kept_indices;  ///< ascending, local to the chunk
  std::size_t vertical_planes = 0;        ///< vertical planes stripped before the verdict
};

/// Classifies one chunk. A dominant plane steeper than max_tilt_deg has its
/// inliers removed and the remainder is refitted (up to max_vertical_planes
/// times); if too little remains the chunk is vertical and nothing is kept.
/// Otherwise: inlier ratio >= min_inlier_ratio keeps the plane inliers
/// (pure-plane); a low-Z band Z <= P(z_percentile) + z_band holding at least
/// min_mode_fraction of the points is kept (mixed); else the band is kept
/// only when it has at least cleanup.min_pts points (unordered). Chunks
/// with fewer than 3 points pass through unchanged as unordered.
ChunkVerdict filter_chunk(const GridChunk& chunk, const GroundFilterParams& params, std::uint64_t seed);

/// Per-chunk RNG seed; independent of scheduling.
std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk_index);

/// Ascending indices of ground points: union of per-chunk kept sets followed
/// by a DBSCAN pass that drops clusters smaller than cleanup.min_pts.
std::vector<std::size_t> filter_ground_indices(const PointCloud& cloud, const GroundFilterParams& params,
                                               std::uint64_t seed);

PointCloud filter_ground(const PointCloud& cloud, const GroundFilterParams& params, std::uint64_t seed);

/// Number of points appended by add_alignment_corners. They are always the
/// trailing points of the returned cloud.
inline constexpr std::size_t kAlignmentCornerCount = 4;

/// Appends the four XY corners of `original_bbox` at height z, so a raster
/// derived from the result spans the original cloud's extent.
PointCloud add_alignment_corners(const PointCloud& road, const BoundingBox2D& original_bbox, double z);

}  // namespace roadex
