// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "roadex/errors.hpp"
#include "roadex/parallel.hpp"
#include "roadex/skeleton.hpp"

namespace roadex {
namespace {

constexpr char kArchiveMagic[] = "roadex-tiles 1";

double world_pixels(int zoom) { return std::ldexp(static_cast<double>(kTileSize), zoom); }

void check_zoom(int zoom) {
  if (zoom < 0 || zoom > 30) throw RangeError("zoom must be in [0, 30]");
}

void check_tile_size(const RgbImage& img, const TileCoord& coord) {
  if (img.width() != kTileSize || img.height() != kTileSize) {
    throw IoError(to_string(coord), "tile is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                        ", expected 256x256");
  }
}

}  // namespace

std::string to_string(const TileCoord& t) {
  return std::to_string(t.zoom) + "/" + std::to_string(t.x) + "/" + std::to_string(t.y);
}

Vec2 gps_to_global_pixel(double lat, double lon, int zoom) {
  const double size = world_pixels(zoom);
  const double phi = lat * std::numbers::pi / 180.0;
  return {(lon + 180.0) / 360.0 * size, (1.0 - std::asinh(std::tan(phi)) / std::numbers::pi) / 2.0 * size};
}

LatLon global_pixel_to_gps(double x, double y, int zoom) {
  const double size = world_pixels(zoom);
  const double lon = x / size * 360.0 - 180.0;
  const double lat = std::atan(std::sinh(std::numbers::pi * (1.0 - 2.0 * y / size))) * 180.0 / std::numbers::pi;
  return {lat, lon};
}

TilePosition gps_to_tile(double lat, double lon, int zoom) {
  check_zoom(zoom);
  if (!(std::abs(lat) <= kMaxLatitude)) throw RangeError("latitude outside the Web-Mercator range");
  if (!(std::abs(lon) <= 180.0)) throw RangeError("longitude outside [-180, 180]");
  const Vec2 g = gps_to_global_pixel(lat, lon, zoom);
  const int last = (1 << zoom) - 1;
  TilePosition t;
  t.tile.zoom = zoom;
  t.tile.x = std::clamp(static_cast<int>(std::floor(g.x / kTileSize)), 0, last);
  t.tile.y = std::clamp(static_cast<int>(std::floor(g.y / kTileSize)), 0, last);
  t.offset_x = g.x - t.tile.x * static_cast<double>(kTileSize);
  t.offset_y = g.y - t.tile.y * static_cast<double>(kTileSize);
  return t;
}

void validate(const GpsBounds& b) {
  for (double lat : {b.lat_min, b.lat_max}) {
    if (!(std::abs(lat) <= kMaxLatitude)) throw RangeError("latitude outside the Web-Mercator range");
  }
  for (double lon : {b.lon_min, b.lon_max}) {
    if (!(std::abs(lon) <= 180.0)) throw RangeError("longitude outside [-180, 180]");
  }
  if (!(b.lat_min < b.lat_max) || !(b.lon_min < b.lon_max)) throw RangeError("bounds must have positive area");
}

RgbImage DirectoryTileSource::tile(const TileCoord& c) const {
  const auto path = root_ / std::to_string(c.zoom) / std::to_string(c.x) / (std::to_string(c.y) + ".png");
  if (!std::filesystem::exists(path)) throw IoError(path, "missing tile " + to_string(c));
  RgbImage img = read_rgb_png(path);
  check_tile_size(img, c);
  return img;
}

void MemoryTileSource::add(const TileCoord& coord, RgbImage image) {
  check_tile_size(image, coord);
  tiles_[coord] = std::move(image);
}

RgbImage MemoryTileSource::tile(const TileCoord& c) const {
  const auto it = tiles_.find(c);
  if (it == tiles_.end()) throw IoError(to_string(c), "missing tile " + to_string(c));
  return it->second;
}

ArchiveTileSource::ArchiveTileSource(const std::filesystem::path& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open tile archive");
  std::string line;
  if (!std::getline(in, line) || line != kArchiveMagic) throw IoError(path, "not a tile archive");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream header(line);
    TileCoord c;
    std::size_t size = 0;
    if (!(header >> c.zoom >> c.x >> c.y >> size)) throw IoError(path, "bad archive entry header: " + line);
    std::vector<std::uint8_t> bytes(size);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
      throw IoError(path, "archive entry " + to_string(c) + " is truncated");
    }
    png_[c] = std::move(bytes);
  }
}

RgbImage ArchiveTileSource::tile(const TileCoord& c) const {
  const auto it = png_.find(c);
  if (it == png_.end()) throw IoError(path_, "missing tile " + to_string(c));
  RgbImage img = decode_rgb_png(it->second);
  check_tile_size(img, c);
  return img;
}

void write_tile_archive(const std::map<TileCoord, RgbImage>& tiles, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << kArchiveMagic << '\n';
  for (const auto& [c, img] : tiles) {
    const auto bytes = encode_png(img);
    out << c.zoom << ' ' << c.x << ' ' << c.y << ' ' << bytes.size() << '\n';
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw IoError(path, "write failed");
}

Vec2 CanvasMapping::gps_to_pixel(double lat, double lon) const {
  const Vec2 g = gps_to_global_pixel(lat, lon, zoom);
  Vec2 out{g.x - origin_x, 0.0};
  if (row_top.empty()) return out;
  const auto it = std::upper_bound(row_top.begin(), row_top.end(), g.y);
  if (it == row_top.begin()) {
    out.y = g.y - row_top.front();
    return out;
  }
  const auto row = static_cast<std::size_t>(std::distance(row_top.begin(), it) - 1);
  const double frac = g.y - row_top[row];
  if (frac >= 1.0 && row + 1 < row_top.size()) {
    out.y = static_cast<double>(row + 1);  // inside a removed band
  } else {
    out.y = static_cast<double>(row) + frac;
  }
  return out;
}

LatLon CanvasMapping::pixel_to_gps(double x, double y) const {
  if (row_top.empty()) throw GeorefError("canvas mapping has no rows");
  const auto last = static_cast<double>(row_top.size() - 1);
  const double row = std::clamp(std::floor(y), 0.0, last);
  const double gy = row_top[static_cast<std::size_t>(row)] + (y - row);
  return global_pixel_to_gps(origin_x + x, gy, zoom);
}

WorldFile CanvasMapping::world_file() const {
  WorldFile wf;
  const LatLon first = pixel_to_gps(0.5, 0.5);
  const double rows = static_cast<double>(row_top.size());
  const double lon_step = 360.0 / world_pixels(zoom);
  wf.x_scale = lon_step;
  wf.y_scale = rows > 1 ? (pixel_to_gps(0.5, rows - 0.5).lat - first.lat) / (rows - 1.0) : -lon_step;
  wf.x_origin = first.lon;
  wf.y_origin = first.lat;
  return wf;
}

TileRange tile_range(const GpsBounds& bounds, int zoom) {
  validate(bounds);
  check_zoom(zoom);
  const Vec2 nw = gps_to_global_pixel(bounds.lat_max, bounds.lon_min, zoom);
  const Vec2 se = gps_to_global_pixel(bounds.lat_min, bounds.lon_max, zoom);
  // Snap values within 1e-9 tile of a boundary so exact tile edges do not
  // pull in a neighbouring tile through rounding.
  constexpr double eps = 1e-9;
  const int n = 1 << zoom;
  TileRange r;
  r.zoom = zoom;
  r.x_min = std::clamp(static_cast<int>(std::floor(nw.x / kTileSize + eps)), 0, n - 1);
  r.y_min = std::clamp(static_cast<int>(std::floor(nw.y / kTileSize + eps)), 0, n - 1);
  const int x_end = std::clamp(static_cast<int>(std::ceil(se.x / kTileSize - eps)), r.x_min + 1, n);
  const int y_end = std::clamp(static_cast<int>(std::ceil(se.y / kTileSize - eps)), r.y_min + 1, n);
  r.cols = x_end - r.x_min;
  r.rows = y_end - r.y_min;
  return r;
}

StitchedMap stitch(const GpsBounds& bounds, int zoom, const TileSource& source) {
  const TileRange range = tile_range(bounds, zoom);
  const auto count = static_cast<std::size_t>(range.cols) * static_cast<std::size_t>(range.rows);
  std::vector<RgbImage> tiles(count);
  parallel_for(count, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const int col = static_cast<int>(i % static_cast<std::size_t>(range.cols));
      const int row = static_cast<int>(i / static_cast<std::size_t>(range.cols));
      tiles[i] = source.tile({zoom, range.x_min + col, range.y_min + row});
    }
  }, 1);

  StitchedMap out;
  out.tile_cols = range.cols;
  out.tile_rows = range.rows;
  out.image = RgbImage(range.cols * kTileSize, range.rows * kTileSize);
  for (std::size_t i = 0; i < count; ++i) {
    const int col = static_cast<int>(i % static_cast<std::size_t>(range.cols));
    const int row = static_cast<int>(i / static_cast<std::size_t>(range.cols));
    out.image.blit(tiles[i], col * kTileSize, row * kTileSize);
  }
  out.mapping.zoom = zoom;
  out.mapping.origin_x = static_cast<double>(range.x_min) * kTileSize;
  out.mapping.row_top.resize(static_cast<std::size_t>(out.image.height()));
  for (std::size_t r = 0; r < out.mapping.row_top.size(); ++r) {
    out.mapping.row_top[r] = static_cast<double>(range.y_min) * kTileSize + static_cast<double>(r);
  }
  return out;
}

namespace {

bool in_label_band(int row, int tile_rows, int band) {
  const int tile_row = row / kTileSize;
  return tile_row < tile_rows - 1 && row % kTileSize >= kTileSize - band;
}

}  // namespace

RgbImage remove_label_rows(const RgbImage& canvas, int tile_rows, int band) {
  if (tile_rows < 1 || canvas.height() != tile_rows * kTileSize) {
    throw ParameterError("canvas height must equal tile_rows * 256");
  }
  if (band < 0 || band >= kTileSize) throw ParameterError("label band must be in [0, 256)");
  RgbImage out(canvas.width(), canvas.height() - band * (tile_rows - 1));
  int dst = 0;
  for (int row = 0; row < canvas.height(); ++row) {
    if (in_label_band(row, tile_rows, band)) continue;
    out.blit(canvas.crop(0, row, canvas.width(), 1), 0, dst++);
  }
  return out;
}

StitchedMap remove_label_rows(const StitchedMap& map, int band) {
  StitchedMap out;
  out.tile_rows = map.tile_rows;
  out.tile_cols = map.tile_cols;
  out.image = remove_label_rows(map.image, map.tile_rows, band);
  out.mapping.zoom = map.mapping.zoom;
  out.mapping.origin_x = map.mapping.origin_x;
  for (int row = 0; row < map.image.height(); ++row) {
    if (!in_label_band(row, map.tile_rows, band)) out.mapping.row_top.push_back(map.mapping.row_top[static_cast<std::size_t>(row)]);
  }
  return out;
}

StitchedMap crop_to_bounds(const StitchedMap& map, const GpsBounds& bounds) {
  validate(bounds);
  const Vec2 nw = map.mapping.gps_to_pixel(bounds.lat_max, bounds.lon_min);
  const Vec2 se = map.mapping.gps_to_pixel(bounds.lat_min, bounds.lon_max);
  constexpr double eps = 1e-6;
  const int x0 = static_cast<int>(std::floor(nw.x + eps));
  const int y0 = static_cast<int>(std::floor(nw.y + eps));
  const int x1 = static_cast<int>(std::ceil(se.x - eps));
  const int y1 = static_cast<int>(std::ceil(se.y - eps));
  if (x0 < 0 || y0 < 0 || x1 > map.image.width() || y1 > map.image.height()) {
    throw RangeError("bounds extend beyond the stitched canvas");
  }
  if (x1 <= x0 || y1 <= y0) throw RangeError("bounds cover no pixels");
  StitchedMap out;
  out.tile_rows = map.tile_rows;
  out.tile_cols = map.tile_cols;
  out.image = map.image.crop(x0, y0, x1 - x0, y1 - y0);
  out.mapping.zoom = map.mapping.zoom;
  out.mapping.origin_x = map.mapping.origin_x + x0;
  out.mapping.row_top.assign(map.mapping.row_top.begin() + y0, map.mapping.row_top.begin() + y1);
  return out;
}

std::vector<ColorRange> default_road_colors() { return {{{240, 240, 240}, {255, 255, 255}}}; }

Raster close3x3(const Raster& binary) {
  const int w = binary.width(), h = binary.height();
  Raster dilated(binary.georef());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool any = false;
      for (int dy = -1; dy <= 1 && !any; ++dy) {
        for (int dx = -1; dx <= 1 && !any; ++dx) any = binary.get(x + dx, y + dy) != 0.0;
      }
      dilated.at(x, y) = any ? 1.0 : 0.0;
    }
  }
  Raster out(binary.georef());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = -1; dy <= 1 && all; ++dy) {
        for (int dx = -1; dx <= 1 && all; ++dx) {
          if (dilated.in_bounds(x + dx, y + dy)) all = dilated.at(x + dx, y + dy) != 0.0;
        }
      }
      out.at(x, y) = all ? 1.0 : 0.0;
    }
  }
  return out;
}

RoadMask extract_road_mask(const RgbImage& image, const std::vector<ColorRange>& ranges, const Georef* georef) {
  if (ranges.empty()) throw ParameterError("at least one road colour range is required");
  Georef g{0.0, 0.0, 1.0, image.width(), image.height()};
  if (georef) {
    if (georef->width != image.width() || georef->height != image.height()) {
      throw GeorefError("georef does not match the image size");
    }
    g = *georef;
  }
  Raster selected(g);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgb c = image.at(x, y);
      const bool hit = std::any_of(ranges.begin(), ranges.end(), [&](const ColorRange& r) { return r.contains(c); });
      selected.at(x, y) = hit ? 1.0 : 0.0;
    }
  }
  RoadMask out;
  out.mask = close3x3(selected);
  out.empty = out.mask.count_nonzero() == 0;
  out.skeleton = out.empty ? Raster(g) : thin(out.mask);
  return out;
}

}  // namespace roadex
