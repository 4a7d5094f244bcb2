// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Centrelines: smoothing of skeleton polylines, lifting them back onto the
// ground surface, cross-section normals and normal-guided region growing.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "roadex/cloud.hpp"
#include "roadex/raster.hpp"
#include "roadex/skeleton.hpp"
#include "roadex/spatial_index.hpp"

namespace roadex {

struct Polyline2D {
  std::vector<Vec2> vertices;
  bool closed = false;  ///< last vertex connects back to the first
};

struct Centerline3D {
  std::vector<Vec3> vertices;
  std::vector<Vec2> normals;  ///< unit, XY plane; empty until compute_normals
  bool closed = false;
};

struct SavGolParams {
  std::size_t window = 11;
  std::size_t polyorder = 3;
};

void validate(const SavGolParams& params);

enum class SmoothStatus { ok, too_short };

struct SmoothResult {
  Polyline2D line;
  SmoothStatus status = SmoothStatus::ok;
};

/// Least-squares polynomial smoothing of one channel. Open sequences use the
/// first/last full window for the ends; closed ones wrap around.
std::vector<double> savgol_filter(std::span<const double> values, const SavGolParams& params, bool closed);

/// Smooths x and y independently. Lines shorter than the window come back
/// unchanged with status too_short.
SmoothResult savgol_smooth(const Polyline2D& line, const SavGolParams& params);

/// z per vertex = median Z of ground points within `radius` in XY. Vertices
/// without support are interpolated by arc length; ends copy the nearest
/// supported vertex. `index` must be a 2D index over `ground`. Throws
/// FitError when no vertex has support.
Centerline3D backproject(const Polyline2D& line, const PointCloud& ground, const SpatialIndex& index, double radius);

/// Normal = unit central-difference tangent rotated +90 degrees (one-sided
/// at open ends). Throws ParameterError on repeated consecutive vertices.
Centerline3D compute_normals(Centerline3D line);

struct RegionGrowParams {
  double half_width = 6.0;   ///< metres across the line
  double z_tolerance = 0.3;  ///< metres
  double sample_step = 1.0;  ///< metres along the line
};

void validate(const RegionGrowParams& params);

/// Ascending indices of ground points inside the cross-section box
/// (|normal offset| <= half_width, |tangential offset| <= sample_step / 2,
/// |dz| <= z_tolerance) of some sample along any of the lines. Samples are
/// taken every sample_step / 2.
std::vector<std::size_t> region_grow_indices(std::span<const Centerline3D> lines, const PointCloud& ground,
                                             const SpatialIndex& index, const RegionGrowParams& params);
PointCloud region_grow(const Centerline3D& line, const PointCloud& ground, const SpatialIndex& index,
                       const RegionGrowParams& params);

struct RasterParams {
  double pixel_size = 0.5;  ///< metres
  double sigma = 5.0;       ///< pixels
  double threshold = 0.2;   ///< of the max-normalised blurred density
};

void validate(const RasterParams& params);

struct SkeletonResult {
  Raster density;  ///< normalised top-down counts
  Raster binary;
  SkeletonGraph graph;  ///< after pruning and bridging
};

/// project -> blur -> renormalise -> binarize -> skeleton_graph.
/// The last `extent_only_tail` points only widen the raster extent.
SkeletonResult skeletonize_cloud(const PointCloud& cloud, const RasterParams& raster, const SkeletonParams& skeleton,
                                 std::size_t extent_only_tail = 0);

/// One world-space polyline per branch with at least two pixels.
std::vector<Polyline2D> branch_polylines(const SkeletonGraph& graph);

struct CenterlineParams {
  RasterParams raster;
  SkeletonParams skeleton;
  SavGolParams savgol;
  double z_radius = 1.5;  ///< metres
};

/// Smooths, back-projects and orients every branch of `graph` over `ground`.
std::vector<Centerline3D> centerlines_from_graph(const SkeletonGraph& graph, const PointCloud& ground,
                                                 const SpatialIndex& index, const CenterlineParams& params);

/// Re-skeletonises the road points and returns one centreline per branch.
std::vector<Centerline3D> final_centerline(const PointCloud& road, const CenterlineParams& params);

/// GeoJSON FeatureCollection of LineStrings with [x, y, z] coordinates.
std::string to_geojson(std::span<const Centerline3D> lines);
/// All vertices of all lines as a point cloud.
PointCloud centerline_points(std::span<const Centerline3D> lines);

}  // namespace roadex
