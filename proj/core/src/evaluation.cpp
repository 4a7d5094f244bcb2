// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>

#include "roadex/errors.hpp"
#include "roadex/parallel.hpp"
#include "roadex/spatial_index.hpp"

namespace roadex {

void validate(const IoUParams& params) {
  if (!(params.voxel > 0.0) || !(params.threshold > 0.0)) throw ParameterError("voxel and threshold must be positive");
}

std::size_t count_matched(const PointCloud& a, const PointCloud& b, double threshold) {
  if (a.empty() || b.empty()) return 0;
  const SpatialIndex index(b, 3);
  std::atomic<std::size_t> matched{0};
  parallel_for(a.size(), [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (index.count_in_radius(to_vec3(a[i]), threshold, 1) > 0) ++local;
    }
    matched += local;
  });
  return matched;
}

IoUReport iou(const PointCloud& cloud1, const PointCloud& cloud2, const IoUParams& params) {
  validate(params);
  if (cloud1.empty() || cloud2.empty()) throw ParameterError("IoU needs two non-empty clouds");
  const auto start = std::chrono::steady_clock::now();
  const PointCloud d1 = voxel_downsample(cloud1, params.voxel);
  const PointCloud d2 = voxel_downsample(cloud2, params.voxel);
  IoUReport r;
  r.n1 = d1.size();
  r.n2 = d2.size();
  // Matching is not one-to-one, so each side can match a different number of
  // points; the smaller count keeps the result symmetric and within [0, 1].
  r.intersection = std::min(count_matched(d1, d2, params.threshold), count_matched(d2, d1, params.threshold));
  r.union_count = r.n1 + r.n2 - r.intersection;
  r.iou = static_cast<double>(r.intersection) / static_cast<double>(r.union_count);
  r.voxel = params.voxel;
  r.threshold = params.threshold;
  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_json(const IoUReport& r) {
  nlohmann::ordered_json j;
  j["iou"] = r.iou;
  j["intersection"] = r.intersection;
  j["union"] = r.union_count;
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  j["voxel"] = r.voxel;
  j["threshold"] = r.threshold;
  j["elapsed_s"] = r.elapsed_s;
  return j.dump(2);
}

double reduction_percent(std::size_t original, std::size_t kept) {
  if (original == 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(kept) / static_cast<double>(original));
}

RunStats run_stats(std::size_t original, std::size_t kept, double elapsed_s, std::optional<std::size_t> previous) {
  if (kept > original) throw ParameterError("kept point count exceeds the original");
  if (elapsed_s < 0.0) throw ParameterError("elapsed time must be non-negative");
  RunStats s;
  s.original_points = original;
  s.kept_points = kept;
  s.reduction = reduction_percent(original, kept);
  s.elapsed_s = elapsed_s;
  if (previous) {
    s.previous_points = previous;
    s.previous_reduction = reduction_percent(*previous, kept);
  }
  return s;
}

RunStats run_stats(const PointCloud& original, const PointCloud& kept, double elapsed_s) {
  return run_stats(original.size(), kept.size(), elapsed_s);
}

std::string to_json(const RunStats& s) {
  nlohmann::ordered_json j;
  j["original_points"] = s.original_points;
  j["kept_points"] = s.kept_points;
  j["reduction"] = s.reduction;
  if (s.previous_points) {
    j["previous_points"] = *s.previous_points;
    j["previous_reduction"] = *s.previous_reduction;
  }
  j["elapsed_s"] = s.elapsed_s;
  return j.dump(2);
}

Overlay overlay(const Raster& truth_mask, const PointCloud& extracted, const Georef& georef) {
  if (georef.width != truth_mask.width() || georef.height != truth_mask.height()) {
    throw GeorefError("overlay georef does not match the mask dimensions");
  }
  Overlay o;
  o.georef = georef;
  const std::size_t n = truth_mask.size();
  std::vector<char> hit(n, 0);
  std::size_t on_grid = 0;
  for (const Point3& p : extracted) {
    const Pixel px = georef.world_to_pixel(p.x, p.y);
    if (!georef.in_bounds(px)) continue;
    hit[static_cast<std::size_t>(px.y) * static_cast<std::size_t>(georef.width) + static_cast<std::size_t>(px.x)] = 1;
    ++on_grid;
  }
  if (!extracted.empty() && on_grid == 0) throw GeorefError("extracted cloud does not overlap the mask extent");
  o.classes.assign(n, 0);
  const auto mask = truth_mask.values();
  for (std::size_t i = 0; i < n; ++i) {
    const bool m = mask[i] != 0.0;
    if (m && hit[i]) {
      o.classes[i] = static_cast<std::uint8_t>(OverlayClass::true_positive);
      ++o.true_positive;
    } else if (hit[i]) {
      o.classes[i] = static_cast<std::uint8_t>(OverlayClass::false_positive);
      ++o.false_positive;
    } else if (m) {
      o.classes[i] = static_cast<std::uint8_t>(OverlayClass::false_negative);
      ++o.false_negative;
    }
  }
  return o;
}

const std::vector<Rgb>& overlay_palette() {
  static const std::vector<Rgb> palette{{0, 0, 0}, {0, 200, 0}, {220, 0, 0}, {0, 90, 255}};
  return palette;
}

void write_overlay_png(const Overlay& o, const std::filesystem::path& path) {
  write_indexed_png(o.georef.width, o.georef.height, o.classes, overlay_palette(), path);
  write_world_file(world_file(o.georef), world_file_path(path));
}

PointCloud mask_to_points(const Raster& mask) {
  PointCloud out;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y) == 0.0) continue;
      const Vec2 w = mask.georef().pixel_to_world(x, y);
      out.push_back({static_cast<float>(w.x), static_cast<float>(w.y), 0.0f});
    }
  }
  return out;
}

}  // namespace roadex
