// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cloud-to-cloud IoU with voxel equalisation and distance matching,
// point-retention statistics and TP/FP/FN overlay rasters.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roadex/cloud.hpp"
#include "roadex/image_io.hpp"
#include "roadex/raster.hpp"

namespace roadex {

struct IoUParams {
  double voxel = 0.5;      ///< metres
  double threshold = 0.5;  ///< match distance, metres
};

void validate(const IoUParams& params);

struct IoUReport {
  double iou = 0.0;
  std::size_t intersection = 0;
  std::size_t union_count = 0;
  std::size_t n1 = 0;  ///< downsampled sizes
  std::size_t n2 = 0;
  double voxel = 0.0;
  double threshold = 0.0;
  double elapsed_s = 0.0;
};

/// Points of `a` having at least one point of `b` within `threshold` (3D).
std::size_t count_matched(const PointCloud& a, const PointCloud& b, double threshold);

/// Both clouds are voxel-downsampled; intersection = the smaller of the two
/// matched counts; union = n1 + n2 - intersection. Throws ParameterError on empty input.
IoUReport iou(const PointCloud& cloud1, const PointCloud& cloud2, const IoUParams& params);

/// {"iou", "intersection", "union", "n1", "n2", "voxel", "threshold", "elapsed_s"}
std::string to_json(const IoUReport& report);

struct RunStats {
  std::size_t original_points = 0;
  std::size_t kept_points = 0;
  double reduction = 0.0;  ///< percent of original removed
  std::optional<std::size_t> previous_points;
  std::optional<double> previous_reduction;  ///< percent relative to previous_points
  double elapsed_s = 0.0;
};

/// 100 * (1 - kept / original); 0 for an empty original.
double reduction_percent(std::size_t original, std::size_t kept);

RunStats run_stats(std::size_t original, std::size_t kept, double elapsed_s,
                   std::optional<std::size_t> previous = std::nullopt);
RunStats run_stats(const PointCloud& original, const PointCloud& kept, double elapsed_s);

std::string to_json(const RunStats& stats);

enum class OverlayClass : std::uint8_t { background = 0, true_positive = 1, false_positive = 2, false_negative = 3 };

struct Overlay {
  Georef georef;
  std::vector<std::uint8_t> classes;  ///< OverlayClass per pixel, row-major
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;

  OverlayClass at(int x, int y) const {
    return static_cast<OverlayClass>(
        classes[static_cast<std::size_t>(y) * static_cast<std::size_t>(georef.width) + static_cast<std::size_t>(x)]);
  }
};

/// Rasterises `extracted` with `georef` (which must match the mask grid) and
/// classifies each pixel against the mask. Throws GeorefError when the grids
/// differ or when no extracted point falls on the grid.
Overlay overlay(const Raster& truth_mask, const PointCloud& extracted, const Georef& georef);

/// Palette: background black, TP green, FP red, FN blue.
const std::vector<Rgb>& overlay_palette();
/// Indexed PNG plus world-file sidecar.
void write_overlay_png(const Overlay& overlay, const std::filesystem::path& path);

/// One point (z = 0) at the centre of each foreground pixel, row-major.
PointCloud mask_to_points(const Raster& mask);

}  // namespace roadex
