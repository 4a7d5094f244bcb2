// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Road-mask ground truth from web map tiles: Web-Mercator tile addressing,
// stitching, removal of the provider's label band between tile rows,
// cropping to a GPS box and colour-based road extraction.

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "roadex/image_io.hpp"
#include "roadex/raster.hpp"

namespace roadex {

inline constexpr int kTileSize = 256;
inline constexpr double kMaxLatitude = 85.0511287798066;
inline constexpr int kDefaultLabelRows = 22;

struct TileCoord {
  int zoom = 0;
  int x = 0;
  int y = 0;

  friend auto operator<=>(const TileCoord&, const TileCoord&) = default;
};

std::string to_string(const TileCoord& t);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct TilePosition {
  TileCoord tile;
  double offset_x = 0.0;  ///< pixels within the tile, [0, 256)
  double offset_y = 0.0;
};

/// Continuous global pixel position (tile index * 256 + offset).
Vec2 gps_to_global_pixel(double lat, double lon, int zoom);
LatLon global_pixel_to_gps(double x, double y, int zoom);

/// Throws RangeError when |lat| exceeds the Web-Mercator limit, |lon| > 180
/// or the zoom is outside [0, 30].
TilePosition gps_to_tile(double lat, double lon, int zoom);

struct GpsBounds {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;
};

/// Throws RangeError for out-of-range or zero-area bounds.
void validate(const GpsBounds& bounds);

class TileSource {
 public:
  virtual ~TileSource() = default;
  /// Returns a 256x256 tile or throws IoError naming the coordinate.
  virtual RgbImage tile(const TileCoord& coord) const = 0;
};

/// Reads root/{z}/{x}/{y}.png.
class DirectoryTileSource final : public TileSource {
 public:
  explicit DirectoryTileSource(std::filesystem::path root) : root_(std::move(root)) {}
  RgbImage tile(const TileCoord& coord) const override;

 private:
  std::filesystem::path root_;
};

class MemoryTileSource final : public TileSource {
 public:
  void add(const TileCoord& coord, RgbImage image);
  RgbImage tile(const TileCoord& coord) const override;

 private:
  std::map<TileCoord, RgbImage> tiles_;
};

/// Single-file recording of PNG tiles: a "roadex-tiles 1" line followed by
/// "z x y size" lines, each followed by `size` bytes of PNG data.
class ArchiveTileSource final : public TileSource {
 public:
  explicit ArchiveTileSource(const std::filesystem::path& path);
  RgbImage tile(const TileCoord& coord) const override;

 private:
  std::filesystem::path path_;
  std::map<TileCoord, std::vector<std::uint8_t>> png_;
};

void write_tile_archive(const std::map<TileCoord, RgbImage>& tiles, const std::filesystem::path& path);

/// Pixel <-> GPS relation of a (possibly shifted and cropped) canvas.
/// Columns map linearly onto global pixels; rows go through a table since
/// label removal drops bands of rows.
struct CanvasMapping {
  int zoom = 0;
  double origin_x = 0.0;          ///< global pixel x of the left edge of column 0
  std::vector<double> row_top;    ///< global pixel y of the top edge of each row

  /// Continuous canvas position (column, row) of a GPS point. Points inside
  /// a removed band snap to the first row after it.
  Vec2 gps_to_pixel(double lat, double lon) const;
  /// GPS position of a continuous canvas position.
  LatLon pixel_to_gps(double x, double y) const;
  /// Linear approximation in degrees: lon per pixel, lat per pixel (row 0
  /// to the last row), centre of pixel (0,0).
  WorldFile world_file() const;
};

struct StitchedMap {
  RgbImage image;
  CanvasMapping mapping;
  int tile_rows = 0;
  int tile_cols = 0;
};

/// Tile range whose union covers the bounds; the max corner is exclusive.
struct TileRange {
  int zoom = 0;
  int x_min = 0;
  int y_min = 0;
  int cols = 0;
  int rows = 0;
};

TileRange tile_range(const GpsBounds& bounds, int zoom);

StitchedMap stitch(const GpsBounds& bounds, int zoom, const TileSource& source);

/// Removes the `band` rows at the bottom of every tile row but the last,
/// shifting content below upward. Height must be tile_rows * 256.
RgbImage remove_label_rows(const RgbImage& canvas, int tile_rows, int band = kDefaultLabelRows);
StitchedMap remove_label_rows(const StitchedMap& map, int band = kDefaultLabelRows);

/// Cuts the canvas to the pixels covering `bounds`. Throws RangeError when
/// the bounds are degenerate or leave the canvas.
StitchedMap crop_to_bounds(const StitchedMap& map, const GpsBounds& bounds);

struct ColorRange {
  Rgb lo;
  Rgb hi;

  bool contains(Rgb c) const {
    return c.r >= lo.r && c.r <= hi.r && c.g >= lo.g && c.g <= hi.g && c.b >= lo.b && c.b <= hi.b;
  }
};

/// Near-white: every channel >= 240.
std::vector<ColorRange> default_road_colors();

struct RoadMask {
  Raster mask;      ///< binary
  Raster skeleton;  ///< thin(mask)
  bool empty = false;
};

/// Pixels inside any colour range, closed with a 3x3 structuring element
/// (erosion ignores pixels outside the image), then thinned. The georef
/// defaults to one unit per pixel.
RoadMask extract_road_mask(const RgbImage& image, const std::vector<ColorRange>& ranges,
                           const Georef* georef = nullptr);

/// Binary closing with a 3x3 square.
Raster close3x3(const Raster& binary);

}  // namespace roadex
