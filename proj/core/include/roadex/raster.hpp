// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Georeferenced single-band rasters: top-down projection of a cloud,
// Gaussian smoothing and thresholding.

#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "roadex/cloud.hpp"

namespace roadex {

struct Pixel {
  int x = 0;  ///< column
  int y = 0;  ///< row, 0 at the top (north)

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Pixel (0,0) is centred on (origin_x, origin_y); rows grow southwards.
struct Georef {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_size = 1.0;
  int width = 0;
  int height = 0;

  Vec2 pixel_to_world(double col, double row) const {
    return {origin_x + col * pixel_size, origin_y - row * pixel_size};
  }
  Vec2 pixel_to_world(Pixel p) const { return pixel_to_world(p.x, p.y); }
  /// Nearest pixel centre; may lie outside the grid.
  Pixel world_to_pixel(double x, double y) const;
  bool in_bounds(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }

  /// Smallest grid whose pixel centres reach every corner of `box`, grown by
  /// `padding` pixels on each side.
  static Georef covering(const BoundingBox2D& box, double pixel_size, int padding = 0);

  friend bool operator==(const Georef&, const Georef&) = default;
};

class Raster {
 public:
  Raster() = default;
  explicit Raster(const Georef& georef, double fill = 0.0);

  const Georef& georef() const noexcept { return georef_; }
  int width() const noexcept { return georef_.width; }
  int height() const noexcept { return georef_.height; }
  std::size_t size() const noexcept { return values_.size(); }

  bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width() && y < height(); }
  double at(int x, int y) const { return values_[offset(x, y)]; }
  double& at(int x, int y) { return values_[offset(x, y)]; }
  double at(Pixel p) const { return at(p.x, p.y); }
  double& at(Pixel p) { return at(p.x, p.y); }
  /// Zero outside the grid.
  double get(int x, int y) const { return in_bounds(x, y) ? at(x, y) : 0.0; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max_value() const;
  double sum() const;
  std::size_t count_nonzero() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(georef_.width) + static_cast<std::size_t>(x);
  }

  Georef georef_;
  std::vector<double> values_;
};

/// G(x,y) = exp(-(x^2+y^2)/(2 sigma^2)) / (2 pi sigma^2), unnormalised.
double gaussian(double x, double y, double sigma);

struct GaussianKernel {
  double sigma = 1.0;
  int radius = 0;
  std::vector<double> weights;  ///< (2r+1)^2, row-major, sums to 1
  std::vector<double> profile;  ///< 2r+1 separable factor, sums to 1

  double at(int dx, int dy) const {
    const int side = 2 * radius + 1;
    return weights[static_cast<std::size_t>(dy + radius) * static_cast<std::size_t>(side) +
                   static_cast<std::size_t>(dx + radius)];
  }
};

/// radius = ceil(3 sigma), weights renormalised to unit sum.
GaussianKernel gaussian_kernel(double sigma);

struct ProjectionOptions {
  int padding = 0;
  /// The last `extent_only_tail` points widen the extent but are not counted.
  std::size_t extent_only_tail = 0;
};

/// Per-pixel point counts divided by the maximum count.
Raster project_topdown(const PointCloud& cloud, double pixel_size, const ProjectionOptions& options = {});

/// Separable convolution with border replication.
Raster blur(const Raster& raster, const GaussianKernel& kernel);

/// Divides by the maximum value; an all-zero raster is returned unchanged.
Raster normalize_max(const Raster& raster);

/// 1 where value >= threshold, else 0.
Raster binarize(const Raster& raster, double threshold);

/// Grows the grid by `pad` pixels per side, copying the nearest edge pixel.
Raster pad_replicate(const Raster& raster, int pad);
/// Sub-grid with its own georef. The region must lie inside the raster.
Raster crop(const Raster& raster, int x, int y, int width, int height);

/// Six-line world file: pixel size, rotation terms, negated pixel size and
/// the world position of the centre of pixel (0,0).
struct WorldFile {
  double x_scale = 1.0;
  double y_rotation = 0.0;
  double x_rotation = 0.0;
  double y_scale = -1.0;
  double x_origin = 0.0;
  double y_origin = 0.0;
};

WorldFile world_file(const Georef& georef);
Georef georef_from(const WorldFile& wf, int width, int height);
void write_world_file(const WorldFile& wf, const std::filesystem::path& path);
WorldFile read_world_file(const std::filesystem::path& path);
/// "mask.png" -> "mask.pgw".
std::filesystem::path world_file_path(const std::filesystem::path& image);

/// 8-bit grayscale PNG (value * 255, rounded) plus world-file sidecar.
void write_raster_png(const Raster& raster, const std::filesystem::path& path);
/// Values are pixel / 255. The sidecar is used when present, otherwise the
/// georef is the identity grid with unit pixels.
Raster read_raster_png(const std::filesystem::path& path);

}  // namespace roadex
