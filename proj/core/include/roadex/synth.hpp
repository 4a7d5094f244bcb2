// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic labelled test scenes: a road network of a chosen shape with
// box buildings, tree crowns and uniform outliers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "roadex/centerline.hpp"
#include "roadex/cloud.hpp"
#include "roadex/evaluation.hpp"
#include "roadex/raster.hpp"

namespace roadex {

enum class SceneKind { straight, loop, intersection, ramp, drift };

std::string_view to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(std::string_view name);

struct SceneSpec {
  SceneKind kind = SceneKind::straight;
  double road_width = 8.0;        ///< metres
  double extent = 100.0;          ///< side of the square scene, metres
  double density = 50.0;          ///< road points per m^2
  double facade_density = 100.0;  ///< wall points per m^2
  std::size_t building_count = 4;
  std::size_t tree_count = 8;
  double noise_fraction = 0.01;   ///< outliers as a share of all points
  double roughness = 0.02;        ///< +- metres on surfaces
  double loop_radius = 35.0;      ///< centreline radius of the ring
  double ramp_grade = 0.08;       ///< rise per metre along x
  double drift_amplitude = 3.0;   ///< metres of lateral warp
  std::uint64_t seed = 7;
};

void validate(const SceneSpec& spec);

enum class Label : std::uint8_t { road = 0, building = 1, vegetation = 2, outlier = 3 };

struct LabelledCloud {
  PointCloud cloud;  ///< intensity holds the numeric label
  std::vector<Label> labels;
  std::vector<Polyline2D> truth_centerlines;
  Raster truth_mask;  ///< 0.5 m road footprint

  std::vector<std::size_t> indices_of(Label label) const;
  PointCloud select(Label label) const;
};

/// Scene centred on the origin. Road points are uniform on the surface
/// within road_width / 2 of a centreline; z follows the kind's profile.
LabelledCloud generate(const SceneSpec& spec);

/// Road centreline height profile used by the generator.
double road_height(const SceneSpec& spec, double x, double y);

/// IoU of `extracted` against the road-labelled points.
IoUReport truth_iou_oracle(const PointCloud& extracted, const LabelledCloud& scene, const IoUParams& params);

}  // namespace roadex
