// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/centerline.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "roadex/errors.hpp"
#include "roadex/parallel.hpp"

namespace roadex {
namespace {

// Row t (offset from the window centre) of the least-squares evaluation
// operator: smoothed(t) = coeffs(t) . window_values.
class SavGolOperator {
 public:
  explicit SavGolOperator(const SavGolParams& p) : half_(static_cast<int>(p.window / 2)) {
    const auto w = static_cast<Eigen::Index>(p.window);
    const auto cols = static_cast<Eigen::Index>(p.polyorder + 1);
    Eigen::MatrixXd a(w, cols);
    for (Eigen::Index i = 0; i < w; ++i) {
      const double t = static_cast<double>(i - half_);
      double v = 1.0;
      for (Eigen::Index j = 0; j < cols; ++j, v *= t) a(i, j) = v;
    }
    const Eigen::MatrixXd pinv = a.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(w, w));
    rows_ = a * pinv;  // row i evaluates the fit at offset i - half
  }

  int half() const { return half_; }
  double coeff(int t, int k) const { return rows_(t + half_, k); }

 private:
  int half_;
  Eigen::MatrixXd rows_;
};

double median(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

struct Sample {
  Vec3 p;
  Vec2 n;
};

std::vector<Sample> samples_along(const Centerline3D& line, double spacing) {
  std::vector<Sample> out;
  const std::size_t n = line.vertices.size();
  if (n == 0) return out;
  if (line.normals.size() != n) throw ParameterError("region_grow needs normals; call compute_normals first");
  if (n == 1) {
    out.push_back({line.vertices[0], line.normals[0]});
    return out;
  }
  const std::size_t segments = line.closed ? n : n - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const Vec3& a = line.vertices[s];
    const Vec3& b = line.vertices[(s + 1) % n];
    const Vec2& na = line.normals[s];
    const Vec2& nb = line.normals[(s + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing)));
    for (std::size_t j = 0; j < steps; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(steps);
      Vec2 nv{na.x + t * (nb.x - na.x), na.y + t * (nb.y - na.y)};
      double nn = std::hypot(nv.x, nv.y);
      if (nn < 1e-9) {
        nv = {-(b.y - a.y), b.x - a.x};
        nn = std::hypot(nv.x, nv.y);
      }
      out.push_back({{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)}, {nv.x / nn, nv.y / nn}});
    }
  }
  if (!line.closed) out.push_back({line.vertices.back(), line.normals.back()});
  return out;
}

}  // namespace

void validate(const SavGolParams& params) {
  if (params.window % 2 == 0) throw ParameterError("savgol window must be odd");
  if (params.polyorder < 1 || params.window <= params.polyorder) {
    throw ParameterError("savgol requires window > polyorder >= 1");
  }
}

void validate(const RegionGrowParams& params) {
  if (!(params.half_width > 0.0) || !(params.z_tolerance > 0.0) || !(params.sample_step > 0.0)) {
    throw ParameterError("region growing parameters must be positive");
  }
}

void validate(const RasterParams& params) {
  if (!(params.pixel_size > 0.0)) throw ParameterError("pixel_size must be positive");
  if (!(params.sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(params.threshold > 0.0 && params.threshold < 1.0)) throw ParameterError("threshold must be in (0, 1)");
}

std::vector<double> savgol_filter(std::span<const double> values, const SavGolParams& params, bool closed) {
  validate(params);
  const std::size_t n = values.size();
  if (n < params.window) throw ParameterError("sequence shorter than the savgol window");
  const SavGolOperator op(params);
  const int m = op.half();
  const auto w = static_cast<int>(params.window);
  const auto ni = static_cast<long>(n);
  std::vector<double> out(n);
  for (long i = 0; i < ni; ++i) {
    double acc = 0.0;
    if (closed || (i >= m && i < ni - m)) {
      for (int k = 0; k < w; ++k) {
        const long j = ((i - m + k) % ni + ni) % ni;
        acc += op.coeff(0, k) * values[static_cast<std::size_t>(j)];
      }
    } else {
      const long start = i < m ? 0 : ni - w;
      const int t = static_cast<int>(i - start) - m;
      for (int k = 0; k < w; ++k) acc += op.coeff(t, k) * values[static_cast<std::size_t>(start + k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SmoothResult savgol_smooth(const Polyline2D& line, const SavGolParams& params) {
  validate(params);
  if (line.vertices.size() < params.window) return {line, SmoothStatus::too_short};
  std::vector<double> xs, ys;
  xs.reserve(line.vertices.size());
  ys.reserve(line.vertices.size());
  for (const Vec2& v : line.vertices) {
    xs.push_back(v.x);
    ys.push_back(v.y);
  }
  const auto sx = savgol_filter(xs, params, line.closed);
  const auto sy = savgol_filter(ys, params, line.closed);
  SmoothResult r;
  r.line.closed = line.closed;
  r.line.vertices.reserve(sx.size());
  for (std::size_t i = 0; i < sx.size(); ++i) r.line.vertices.push_back({sx[i], sy[i]});
  return r;
}

Centerline3D backproject(const Polyline2D& line, const PointCloud& ground, const SpatialIndex& index, double radius) {
  if (ground.empty()) throw ParameterError("backproject needs a non-empty ground cloud");
  if (index.dims() != 2 || index.size() != ground.size()) {
    throw ParameterError("backproject needs a 2D index built on the ground cloud");
  }
  if (!(radius > 0.0)) throw ParameterError("backproject radius must be positive");
  const std::size_t n = line.vertices.size();
  Centerline3D out;
  out.closed = line.closed;
  out.vertices.resize(n);
  std::vector<char> supported(n, 0);
  std::vector<double> zs;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = line.vertices[i];
    zs.clear();
    index.for_each_in_radius({v.x, v.y, 0.0}, radius, [&](std::size_t idx, double) { zs.push_back(ground[idx].z); });
    out.vertices[i] = {v.x, v.y, 0.0};
    if (!zs.empty()) {
      out.vertices[i].z = median(zs);
      supported[i] = 1;
    }
  }
  const auto first = std::find(supported.begin(), supported.end(), 1);
  if (first == supported.end()) throw FitError("no centreline vertex has ground support within the radius");

  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    arc[i] = arc[i - 1] + std::hypot(line.vertices[i].x - line.vertices[i - 1].x,
                                     line.vertices[i].y - line.vertices[i - 1].y);
  }
  std::size_t prev = static_cast<std::size_t>(first - supported.begin());
  for (std::size_t i = 0; i < prev; ++i) out.vertices[i].z = out.vertices[prev].z;
  for (std::size_t i = prev + 1; i < n; ++i) {
    if (!supported[i]) continue;
    const double z0 = out.vertices[prev].z, z1 = out.vertices[i].z;
    const double span = arc[i] - arc[prev];
    for (std::size_t j = prev + 1; j < i; ++j) {
      const double t = span > 0.0 ? (arc[j] - arc[prev]) / span : 0.5;
      out.vertices[j].z = z0 + t * (z1 - z0);
    }
    prev = i;
  }
  for (std::size_t i = prev + 1; i < n; ++i) out.vertices[i].z = out.vertices[prev].z;
  return out;
}

Centerline3D compute_normals(Centerline3D line) {
  const std::size_t n = line.vertices.size();
  if (n < 2) throw ParameterError("normals need at least two vertices");
  const auto& v = line.vertices;
  const std::size_t pairs = line.closed ? n : n - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vec3& a = v[i];
    const Vec3& b = v[(i + 1) % n];
    if (a.x == b.x && a.y == b.y) throw ParameterError("repeated consecutive vertex at " + std::to_string(i));
  }
  line.normals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i == 0 ? (line.closed ? n - 1 : 0) : i - 1;
    std::size_t hi = i + 1 == n ? (line.closed ? 0 : i) : i + 1;
    double tx = v[hi].x - v[lo].x, ty = v[hi].y - v[lo].y;
    double len = std::hypot(tx, ty);
    if (len == 0.0) {
      // A hairpin whose neighbours coincide; fall back to the forward step.
      hi = (i + 1) % n;
      tx = v[hi].x - v[i].x;
      ty = v[hi].y - v[i].y;
      len = std::hypot(tx, ty);
    }
    line.normals[i] = {-ty / len, tx / len};
  }
  return line;
}

std::vector<std::size_t> region_grow_indices(std::span<const Centerline3D> lines, const PointCloud& ground,
                                             const SpatialIndex& index, const RegionGrowParams& params) {
  validate(params);
  if (index.dims() != 2 || index.size() != ground.size()) {
    throw ParameterError("region_grow needs a 2D index built on the ground cloud");
  }
  std::vector<Sample> samples;
  for (const auto& line : lines) {
    auto s = samples_along(line, params.sample_step / 2.0);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  if (samples.empty()) return {};

  const double half_len = params.sample_step / 2.0;
  const double reach = std::hypot(params.half_width, half_len);
  std::vector<std::vector<std::size_t>> per_range;
  std::mutex mutex;
  parallel_for(samples.size(), [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> local;
    for (std::size_t i = b; i < e; ++i) {
      const Sample& s = samples[i];
      const Vec2 t{s.n.y, -s.n.x};
      index.for_each_in_radius({s.p.x, s.p.y, 0.0}, reach, [&](std::size_t idx, double) {
        const Point3& q = ground[idx];
        const double dx = q.x - s.p.x, dy = q.y - s.p.y;
        if (std::abs(dx * s.n.x + dy * s.n.y) > params.half_width) return;
        if (std::abs(dx * t.x + dy * t.y) > half_len) return;
        if (std::abs(q.z - s.p.z) > params.z_tolerance) return;
        local.push_back(idx);
      });
    }
    std::lock_guard lock(mutex);
    per_range.push_back(std::move(local));
  }, 64);

  std::vector<std::size_t> out;
  for (auto& v : per_range) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PointCloud region_grow(const Centerline3D& line, const PointCloud& ground, const SpatialIndex& index,
                       const RegionGrowParams& params) {
  const auto idx = region_grow_indices(std::span<const Centerline3D>(&line, 1), ground, index, params);
  return ground.select(idx);
}

SkeletonResult skeletonize_cloud(const PointCloud& cloud, const RasterParams& raster, const SkeletonParams& skeleton,
                                 std::size_t extent_only_tail) {
  validate(raster);
  validate(skeleton);
  SkeletonResult r;
  r.density = project_topdown(cloud, raster.pixel_size, {0, extent_only_tail});
  r.binary = binarize(normalize_max(blur(r.density, gaussian_kernel(raster.sigma))), raster.threshold);
  r.graph = skeleton_graph(r.binary, skeleton);
  return r;
}

std::vector<Polyline2D> branch_polylines(const SkeletonGraph& graph) {
  std::vector<Polyline2D> out;
  for (const auto& b : graph.branches) {
    const auto pixels = graph.path(b);
    if (pixels.size() < 2) continue;
    Polyline2D line;
    line.closed = b.closed() && pixels.size() >= 3;
    for (Pixel p : pixels) line.vertices.push_back(graph.georef.pixel_to_world(p));
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Centerline3D> centerlines_from_graph(const SkeletonGraph& graph, const PointCloud& ground,
                                                 const SpatialIndex& index, const CenterlineParams& params) {
  std::vector<Centerline3D> out;
  for (const auto& line : branch_polylines(graph)) {
    const SmoothResult smoothed = savgol_smooth(line, params.savgol);
    out.push_back(compute_normals(backproject(smoothed.line, ground, index, params.z_radius)));
  }
  return out;
}

std::vector<Centerline3D> final_centerline(const PointCloud& road, const CenterlineParams& params) {
  if (road.empty()) throw ParameterError("final_centerline needs road points");
  const SpatialIndex index(road, 2);
  const auto skeleton = skeletonize_cloud(road, params.raster, params.skeleton);
  return centerlines_from_graph(skeleton.graph, road, index, params);
}

std::string to_geojson(std::span<const Centerline3D> lines) {
  using nlohmann::json;
  json features = json::array();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    json coords = json::array();
    json normals = json::array();
    for (std::size_t k = 0; k < line.vertices.size(); ++k) {
      coords.push_back({line.vertices[k].x, line.vertices[k].y, line.vertices[k].z});
      if (k < line.normals.size()) normals.push_back({line.normals[k].x, line.normals[k].y});
    }
    if (line.closed && !line.vertices.empty()) {
      coords.push_back(coords.front());
      if (!normals.empty()) normals.push_back(normals.front());
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{"id", i}, {"closed", line.closed}, {"normals", normals}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2);
}

PointCloud centerline_points(std::span<const Centerline3D> lines) {
  PointCloud out;
  for (const auto& line : lines) {
    for (const Vec3& v : line.vertices) {
      out.push_back({static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)});
    }
  }
  return out;
}

}  // namespace roadex
