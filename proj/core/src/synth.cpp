// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "roadex/errors.hpp"
#include "roadex/spatial_index.hpp"

namespace roadex {
namespace {

constexpr double kDenseStep = 0.1;     // metres between centreline vertices used for distances
constexpr double kTruthStep = 0.5;     // metres between exported truth vertices
constexpr double kSetback = 3.0;       // road edge to facade
constexpr double kBuildingHalfLength = 7.5;
constexpr double kBuildingHalfDepth = 5.0;
constexpr double kBuildingHeight = 10.0;
constexpr double kCrownRadius = 2.5;
constexpr double kCrownCentre = 5.5;   // above the road surface
constexpr std::size_t kCrownPoints = 400;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform doubles from raw 64-bit draws, identical on every standard library.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : eng_(splitmix64(seed ^ splitmix64(stream))) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

enum Stream : std::uint64_t { kRoad = 1, kBuildings, kFacades, kTrees, kOutliers };

struct Line {
  std::vector<Vec2> pts;
  bool closed = false;
};

std::vector<Line> dense_centerlines(const SceneSpec& s) {
  const double h = s.extent / 2.0;
  std::vector<Line> lines;
  const auto straight = [&](Vec2 a, Vec2 b) {
    Line l;
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const auto n = static_cast<std::size_t>(std::ceil(len / kDenseStep));
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      l.pts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return l;
  };
  switch (s.kind) {
    case SceneKind::straight:
    case SceneKind::ramp:
      lines.push_back(straight({-h, 0.0}, {h, 0.0}));
      break;
    case SceneKind::intersection:
      lines.push_back(straight({-h, 0.0}, {h, 0.0}));
      lines.push_back(straight({0.0, -h}, {0.0, h}));
      break;
    case SceneKind::loop: {
      Line l;
      l.closed = true;
      const auto n = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * s.loop_radius / kDenseStep));
      for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        l.pts.push_back({s.loop_radius * std::cos(a), s.loop_radius * std::sin(a)});
      }
      lines.push_back(std::move(l));
      break;
    }
    case SceneKind::drift: {
      Line l;
      const auto n = static_cast<std::size_t>(std::ceil(s.extent / (kDenseStep / 2.0)));
      for (std::size_t i = 0; i <= n; ++i) {
        const double x = -h + s.extent * static_cast<double>(i) / static_cast<double>(n);
        l.pts.push_back({x, s.drift_amplitude * std::sin(2.0 * std::numbers::pi * (x + h) / s.extent)});
      }
      lines.push_back(std::move(l));
      break;
    }
  }
  return lines;
}

Polyline2D resample(const Line& line, double step) {
  Polyline2D out;
  out.closed = line.closed;
  double acc = step;
  for (std::size_t i = 0; i < line.pts.size(); ++i) {
    if (i > 0) acc += std::hypot(line.pts[i].x - line.pts[i - 1].x, line.pts[i].y - line.pts[i - 1].y);
    if (acc >= step - 1e-9) {
      out.vertices.push_back(line.pts[i]);
      acc = 0.0;
    }
  }
  if (!line.closed && !(out.vertices.back() == line.pts.back())) out.vertices.push_back(line.pts.back());
  return out;
}

struct Building {
  Vec2 centre;
  Vec2 u;  // unit, along the road
  double base = 0.0;
};

std::array<Vec2, 4> corners(const Building& b) {
  const Vec2 v{-b.u.y, b.u.x};
  std::array<Vec2, 4> c;
  const double sl[4] = {-1, 1, 1, -1};
  const double sd[4] = {-1, -1, 1, 1};
  for (int i = 0; i < 4; ++i) {
    c[i] = {b.centre.x + sl[i] * kBuildingHalfLength * b.u.x + sd[i] * kBuildingHalfDepth * v.x,
            b.centre.y + sl[i] * kBuildingHalfLength * b.u.y + sd[i] * kBuildingHalfDepth * v.y};
  }
  return c;
}

struct Anchor {
  Vec2 at;
  Vec2 tangent;
  Vec2 side;  // unit, pointing away from the road
};

std::vector<Anchor> anchors(const std::vector<Line>& lines, double spacing) {
  std::vector<Anchor> out;
  for (const Line& l : lines) {
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(spacing / kDenseStep)));
    for (std::size_t i = stride / 2; i < l.pts.size(); i += stride) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = std::min(l.pts.size() - 1, i + 1);
      double tx = l.pts[b].x - l.pts[a].x, ty = l.pts[b].y - l.pts[a].y;
      const double len = std::hypot(tx, ty);
      tx /= len;
      ty /= len;
      out.push_back({l.pts[i], {tx, ty}, {-ty, tx}});
      out.push_back({l.pts[i], {tx, ty}, {ty, -tx}});
    }
  }
  return out;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.next() % i]);
}

}  // namespace

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::straight: return "straight";
    case SceneKind::loop: return "loop";
    case SceneKind::intersection: return "intersection";
    case SceneKind::ramp: return "ramp";
    case SceneKind::drift: return "drift";
  }
  return "unknown";
}

std::optional<SceneKind> parse_scene_kind(std::string_view name) {
  for (SceneKind k : {SceneKind::straight, SceneKind::loop, SceneKind::intersection, SceneKind::ramp,
                      SceneKind::drift}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void validate(const SceneSpec& s) {
  if (!(s.density > 0.0) || !(s.facade_density > 0.0)) throw ParameterError("densities must be positive");
  if (!(s.road_width > 0.0)) throw ParameterError("road_width must be positive");
  if (!(s.extent > s.road_width)) throw ParameterError("extent must exceed the road width");
  if (!(s.noise_fraction >= 0.0 && s.noise_fraction < 1.0)) throw ParameterError("noise_fraction must be in [0, 1)");
  if (!(s.roughness >= 0.0)) throw ParameterError("roughness must be non-negative");
  if (s.kind == SceneKind::loop && !(s.loop_radius > s.road_width / 2.0 && s.loop_radius + s.road_width / 2.0 < s.extent / 2.0)) {
    throw ParameterError("loop_radius must keep the ring inside the extent");
  }
  if (s.extent * s.extent * s.density > 5.0e7) throw ParameterError("scene would exceed 5e7 candidate samples");
}

double road_height(const SceneSpec& spec, double x, double /*y*/) {
  return spec.kind == SceneKind::ramp ? spec.ramp_grade * (x + spec.extent / 2.0) : 0.0;
}

std::vector<std::size_t> LabelledCloud::indices_of(Label label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

PointCloud LabelledCloud::select(Label label) const { return cloud.select(indices_of(label)); }

LabelledCloud generate(const SceneSpec& spec) {
  validate(spec);
  const double h = spec.extent / 2.0;
  const double half_w = spec.road_width / 2.0;
  const auto lines = dense_centerlines(spec);

  PointCloud dense;
  for (const Line& l : lines) {
    for (const Vec2& p : l.pts) dense.push_back({static_cast<float>(p.x), static_cast<float>(p.y), 0.0f});
  }
  const SpatialIndex near_line(dense, 2);
  const auto road_distance = [&](double x, double y) { return near_line.nearest({x, y, 0.0}).distance; };

  LabelledCloud out;
  const auto emit = [&](double x, double y, double z, Label label) {
    out.cloud.push_back({static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)},
                        static_cast<float>(label));
    out.labels.push_back(label);
  };

  // Road surface: uniform candidates over the square, kept within half the
  // road width of a centreline.
  {
    Rng rng(spec.seed, kRoad);
    const auto candidates = static_cast<std::size_t>(std::llround(spec.extent * spec.extent * spec.density));
    for (std::size_t i = 0; i < candidates; ++i) {
      const double x = rng.uniform(-h, h);
      const double y = rng.uniform(-h, h);
      const double dz = rng.uniform(-spec.roughness, spec.roughness);
      if (road_distance(x, y) > half_w) continue;
      emit(x, y, road_height(spec, x, y) + dz, Label::road);
    }
  }

  std::vector<Building> buildings;
  {
    Rng rng(spec.seed, kBuildings);
    auto sites = anchors(lines, 10.0);
    shuffle(sites, rng);
    const double reach = std::hypot(kBuildingHalfLength, kBuildingHalfDepth);
    for (const Anchor& a : sites) {
      if (buildings.size() >= spec.building_count) break;
      const double off = half_w + kSetback + kBuildingHalfDepth;
      Building b{{a.at.x + off * a.side.x, a.at.y + off * a.side.y}, a.tangent, 0.0};
      b.base = road_height(spec, b.centre.x, b.centre.y);
      bool ok = true;
      const auto cs = corners(b);
      for (int i = 0; i < 4 && ok; ++i) {
        const Vec2 p = cs[i], q = cs[(i + 1) % 4];
        ok = std::abs(p.x) <= h && std::abs(p.y) <= h;
        for (int k = 0; k <= 20 && ok; ++k) {
          const double t = k / 20.0;
          ok = road_distance(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)) >= half_w + 1.0;
        }
      }
      for (const Building& o : buildings) {
        if (ok) ok = std::hypot(o.centre.x - b.centre.x, o.centre.y - b.centre.y) >= 2.0 * reach + 2.0;
      }
      if (ok) buildings.push_back(b);
    }
  }
  {
    Rng rng(spec.seed, kFacades);
    for (const Building& b : buildings) {
      const auto cs = corners(b);
      for (int i = 0; i < 4; ++i) {
        const Vec2 p = cs[i], q = cs[(i + 1) % 4];
        const double len = std::hypot(q.x - p.x, q.y - p.y);
        const Vec2 n{-(q.y - p.y) / len, (q.x - p.x) / len};
        const auto count = static_cast<std::size_t>(std::llround(len * kBuildingHeight * spec.facade_density));
        for (std::size_t k = 0; k < count; ++k) {
          const double t = rng.uniform(0.0, 1.0);
          const double z = rng.uniform(0.0, kBuildingHeight);
          const double e = rng.uniform(-spec.roughness, spec.roughness);
          emit(p.x + t * (q.x - p.x) + e * n.x, p.y + t * (q.y - p.y) + e * n.y, b.base + z, Label::building);
        }
      }
    }
  }

  {
    Rng rng(spec.seed, kTrees);
    auto sites = anchors(lines, 7.0);
    shuffle(sites, rng);
    std::size_t placed = 0;
    for (const Anchor& a : sites) {
      if (placed >= spec.tree_count) break;
      const double off = half_w + 1.5;
      const Vec2 c{a.at.x + off * a.side.x, a.at.y + off * a.side.y};
      if (std::abs(c.x) > h - kCrownRadius || std::abs(c.y) > h - kCrownRadius) continue;
      if (road_distance(c.x, c.y) < half_w + 1.0) continue;
      bool clear = true;
      for (const Building& b : buildings) {
        clear = clear && std::hypot(b.centre.x - c.x, b.centre.y - c.y) >
                             std::hypot(kBuildingHalfLength, kBuildingHalfDepth) + kCrownRadius;
      }
      if (!clear) continue;
      ++placed;
      const double base = road_height(spec, c.x, c.y) + kCrownCentre;
      for (std::size_t k = 0; k < kCrownPoints;) {
        const double dx = rng.uniform(-1.0, 1.0), dy = rng.uniform(-1.0, 1.0), dz = rng.uniform(-1.0, 1.0);
        if (dx * dx + dy * dy + dz * dz > 1.0) continue;
        emit(c.x + kCrownRadius * dx, c.y + kCrownRadius * dy, base + kCrownRadius * dz, Label::vegetation);
        ++k;
      }
    }
  }

  {
    Rng rng(spec.seed, kOutliers);
    const BoundingBox2D box = bounding_box(out.cloud);
    float zmin = out.cloud[0].z, zmax = out.cloud[0].z;
    for (const Point3& p : out.cloud) {
      zmin = std::min(zmin, p.z);
      zmax = std::max(zmax, p.z);
    }
    const auto count = static_cast<std::size_t>(
        std::llround(spec.noise_fraction / (1.0 - spec.noise_fraction) * static_cast<double>(out.cloud.size())));
    for (std::size_t k = 0; k < count; ++k) {
      const double x = rng.uniform(box.x_min, box.x_max);
      const double y = rng.uniform(box.y_min, box.y_max);
      const double z = rng.uniform(zmin - 2.0, zmax + 5.0);
      emit(x, y, z, Label::outlier);
    }
  }

  for (const Line& l : lines) out.truth_centerlines.push_back(resample(l, kTruthStep));

  BoundingBox2D cover = bounding_box(out.cloud);
  cover.x_min = std::min(cover.x_min, -h);
  cover.y_min = std::min(cover.y_min, -h);
  cover.x_max = std::max(cover.x_max, h);
  cover.y_max = std::max(cover.y_max, h);
  out.truth_mask = Raster(Georef::covering(cover, 0.5));
  for (int y = 0; y < out.truth_mask.height(); ++y) {
    for (int x = 0; x < out.truth_mask.width(); ++x) {
      const Vec2 w = out.truth_mask.georef().pixel_to_world(x, y);
      if (road_distance(w.x, w.y) <= half_w) out.truth_mask.at(x, y) = 1.0;
    }
  }
  return out;
}

IoUReport truth_iou_oracle(const PointCloud& extracted, const LabelledCloud& scene, const IoUParams& params) {
  return iou(extracted, scene.select(Label::road), params);
}

}  // namespace roadex
