// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "roadex/errors.hpp"
#include "roadex/image_io.hpp"
#include "roadex/parallel.hpp"

namespace roadex {

Pixel Georef::world_to_pixel(double x, double y) const {
  const double col = std::floor((x - origin_x) / pixel_size + 0.5);
  const double row = std::floor((origin_y - y) / pixel_size + 0.5);
  return {static_cast<int>(col), static_cast<int>(row)};
}

Georef Georef::covering(const BoundingBox2D& box, double pixel_size, int padding) {
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) throw ParameterError("pixel_size must be positive");
  if (padding < 0) throw ParameterError("padding must be non-negative");
  Georef g;
  g.pixel_size = pixel_size;
  g.origin_x = box.x_min - padding * pixel_size;
  g.origin_y = box.y_max + padding * pixel_size;
  const Pixel far = g.world_to_pixel(box.x_max, box.y_min);
  const double cols = static_cast<double>(far.x) + 1.0 + padding;
  const double rows = static_cast<double>(far.y) + 1.0 + padding;
  if (cols * rows > 4.0e8) throw ParameterError("raster would exceed 4e8 pixels; increase pixel_size");
  g.width = static_cast<int>(cols);
  g.height = static_cast<int>(rows);
  return g;
}

Raster::Raster(const Georef& georef, double fill) : georef_(georef) {
  if (georef.width < 0 || georef.height < 0) throw ParameterError("raster dimensions must be non-negative");
  if (!(georef.pixel_size > 0.0)) throw ParameterError("pixel_size must be positive");
  values_.assign(static_cast<std::size_t>(georef.width) * static_cast<std::size_t>(georef.height), fill);
}

double Raster::max_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

double Raster::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

std::size_t Raster::count_nonzero() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

double gaussian(double x, double y, double sigma) {
  const double s2 = sigma * sigma;
  return std::exp(-(x * x + y * y) / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
}

GaussianKernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be positive");
  GaussianKernel k;
  k.sigma = sigma;
  k.radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int side = 2 * k.radius + 1;
  k.weights.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  double total = 0.0;
  for (int dy = -k.radius; dy <= k.radius; ++dy) {
    for (int dx = -k.radius; dx <= k.radius; ++dx) {
      const double w = gaussian(dx, dy, sigma);
      k.weights[static_cast<std::size_t>(dy + k.radius) * static_cast<std::size_t>(side) +
                static_cast<std::size_t>(dx + k.radius)] = w;
      total += w;
    }
  }
  for (double& w : k.weights) w /= total;

  // The 2D weights factor exactly into profile (x) profile.
  k.profile.resize(static_cast<std::size_t>(side));
  double ptotal = 0.0;
  for (int d = -k.radius; d <= k.radius; ++d) {
    k.profile[static_cast<std::size_t>(d + k.radius)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    ptotal += k.profile[static_cast<std::size_t>(d + k.radius)];
  }
  for (double& w : k.profile) w /= ptotal;
  return k;
}

Raster project_topdown(const PointCloud& cloud, double pixel_size, const ProjectionOptions& options) {
  if (cloud.empty()) throw ParameterError("cannot project an empty cloud");
  if (options.extent_only_tail > cloud.size()) throw ParameterError("extent_only_tail exceeds cloud size");
  const Georef g = Georef::covering(bounding_box(cloud), pixel_size, options.padding);
  Raster r(g);
  const std::size_t counted = cloud.size() - options.extent_only_tail;
  for (std::size_t i = 0; i < counted; ++i) {
    const Pixel p = g.world_to_pixel(cloud[i].x, cloud[i].y);
    // Rounding at the far edge can land one past the grid; clamp it back.
    r.at(std::clamp(p.x, 0, g.width - 1), std::clamp(p.y, 0, g.height - 1)) += 1.0;
  }
  return normalize_max(r);
}

Raster blur(const Raster& raster, const GaussianKernel& kernel) {
  const int w = raster.width();
  const int h = raster.height();
  if (w == 0 || h == 0) return raster;
  const int r = kernel.radius;
  const auto& prof = kernel.profile;

  Raster tmp(raster.georef());
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t b, std::size_t e) {
    for (int y = static_cast<int>(b); y < static_cast<int>(e); ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int d = -r; d <= r; ++d) {
          acc += prof[static_cast<std::size_t>(d + r)] * raster.at(std::clamp(x + d, 0, w - 1), y);
        }
        tmp.at(x, y) = acc;
      }
    }
  }, 16);

  Raster out(raster.georef());
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t b, std::size_t e) {
    for (int y = static_cast<int>(b); y < static_cast<int>(e); ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int d = -r; d <= r; ++d) {
          acc += prof[static_cast<std::size_t>(d + r)] * tmp.at(x, std::clamp(y + d, 0, h - 1));
        }
        out.at(x, y) = acc;
      }
    }
  }, 16);
  return out;
}

Raster normalize_max(const Raster& raster) {
  const double m = raster.max_value();
  Raster out = raster;
  if (m <= 0.0) return out;
  for (double& v : out.values()) v /= m;
  return out;
}

Raster binarize(const Raster& raster, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ParameterError("binarize threshold must be in (0, 1)");
  Raster out = raster;
  for (double& v : out.values()) v = v >= threshold ? 1.0 : 0.0;
  return out;
}

Raster pad_replicate(const Raster& raster, int pad) {
  if (pad < 0) throw ParameterError("pad must be non-negative");
  if (raster.width() == 0 || raster.height() == 0) throw ParameterError("cannot pad an empty raster");
  Georef g = raster.georef();
  g.origin_x -= pad * g.pixel_size;
  g.origin_y += pad * g.pixel_size;
  g.width += 2 * pad;
  g.height += 2 * pad;
  Raster out(g);
  for (int y = 0; y < g.height; ++y) {
    const int sy = std::clamp(y - pad, 0, raster.height() - 1);
    for (int x = 0; x < g.width; ++x) out.at(x, y) = raster.at(std::clamp(x - pad, 0, raster.width() - 1), sy);
  }
  return out;
}

Raster crop(const Raster& raster, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 0 || height < 0 || x + width > raster.width() || y + height > raster.height()) {
    throw ParameterError("crop region outside raster");
  }
  Georef g = raster.georef();
  g.origin_x += x * g.pixel_size;
  g.origin_y -= y * g.pixel_size;
  g.width = width;
  g.height = height;
  Raster out(g);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) out.at(col, row) = raster.at(x + col, y + row);
  }
  return out;
}

WorldFile world_file(const Georef& g) {
  return {g.pixel_size, 0.0, 0.0, -g.pixel_size, g.origin_x, g.origin_y};
}

Georef georef_from(const WorldFile& wf, int width, int height) {
  if (wf.x_rotation != 0.0 || wf.y_rotation != 0.0) throw GeorefError("rotated world files are not supported");
  if (!(wf.x_scale > 0.0) || std::abs(wf.x_scale + wf.y_scale) > 1e-12 * wf.x_scale) {
    throw GeorefError("world file must describe square, north-up pixels");
  }
  return {wf.x_origin, wf.y_origin, wf.x_scale, width, height};
}

void write_world_file(const WorldFile& wf, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out.precision(17);
  out << wf.x_scale << '\n'
      << wf.y_rotation << '\n'
      << wf.x_rotation << '\n'
      << wf.y_scale << '\n'
      << wf.x_origin << '\n'
      << wf.y_origin << '\n';
  if (!out) throw IoError(path, "write failed");
}

WorldFile read_world_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open world file");
  WorldFile wf;
  if (!(in >> wf.x_scale >> wf.y_rotation >> wf.x_rotation >> wf.y_scale >> wf.x_origin >> wf.y_origin)) {
    throw IoError(path, "world file must contain six numbers");
  }
  return wf;
}

std::filesystem::path world_file_path(const std::filesystem::path& image) {
  std::filesystem::path p = image;
  p.replace_extension(".pgw");
  return p;
}

void write_raster_png(const Raster& raster, const std::filesystem::path& path) {
  GrayImage img;
  img.width = raster.width();
  img.height = raster.height();
  img.data.resize(raster.size());
  const auto values = raster.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(values[i], 0.0, 1.0) * 255.0));
  }
  write_png(img, path);
  write_world_file(world_file(raster.georef()), world_file_path(path));
}

Raster read_raster_png(const std::filesystem::path& path) {
  const GrayImage img = read_gray_png(path);
  Georef g{0.0, 0.0, 1.0, img.width, img.height};
  const auto sidecar = world_file_path(path);
  if (std::filesystem::exists(sidecar)) g = georef_from(read_world_file(sidecar), img.width, img.height);
  Raster r(g);
  auto values = r.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = img.data[i] / 255.0;
  return r;
}

}  // namespace roadex
