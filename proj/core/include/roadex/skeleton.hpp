// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Thinning of binary rasters and the pixel graph of the resulting skeleton:
// endpoints, junction clusters and the 8-connected chains between them.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roadex/raster.hpp"

namespace roadex {

struct SkeletonParams {
  double max_bridge_gap = 20.0;     ///< pixels
  std::size_t min_branch_len = 20;  ///< pixels
  std::size_t end_lookback = 10;    ///< pixels used to aim endpoint extensions; 0 disables
};

void validate(const SkeletonParams& params);

/// Zhang-Suen thinning. Each deletion is re-checked against the current
/// image so that only simple, non-end pixels go; a final sweep removes the
/// remaining simple pixels (staircase corners). Foreground is value != 0.
Raster thin(const Raster& binary);

/// Number of 8-connected foreground components.
std::size_t count_components(const Raster& binary);

/// Number of foreground 8-neighbours of (x, y).
int neighbor_count(const Raster& binary, int x, int y);

enum class NodeKind { isolated, endpoint, junction };

struct SkeletonNode {
  NodeKind kind = NodeKind::endpoint;
  std::vector<Pixel> pixels;  ///< one pixel unless a junction cluster
  Pixel centre;               ///< member pixel closest to the cluster mean
  int degree = 0;             ///< incident branch ends (a self-loop counts twice)
};

/// Chain of degree-2 pixels between two nodes. Closed loops without any
/// node have from == to == -1.
struct SkeletonBranch {
  int from = -1;
  int to = -1;
  std::vector<Pixel> interior;

  bool closed() const noexcept { return from < 0; }
};

struct SkeletonGraph {
  Georef georef;
  std::vector<SkeletonNode> nodes;
  std::vector<SkeletonBranch> branches;

  std::size_t endpoint_count() const;
  std::size_t junction_count() const;
  std::size_t pixel_count() const;
  std::size_t component_count() const;
  Raster to_raster() const;
  /// Pixels of a branch including its end-node pixels (the member pixel of
  /// a junction cluster adjacent to the chain). Consecutive pixels are
  /// 8-adjacent.
  std::vector<Pixel> path(const SkeletonBranch& branch) const;
  /// Pixel count of a branch counting endpoint pixels but not junctions.
  std::size_t length(const SkeletonBranch& branch) const;
};

/// Throws ParameterError if the raster contains a 2x2 foreground block.
SkeletonGraph build_graph(const Raster& skeleton);

/// Foreground pixels with at least three foreground 8-neighbours.
std::vector<Pixel> junction_pixels(const Raster& skeleton);
/// junction_pixels merged by 8-adjacency; one centre pixel per cluster,
/// sorted by (row, column).
std::vector<Pixel> detect_junctions(const Raster& skeleton);

/// Joins endpoints lying in different components by straight pixel
/// segments, shortest first, each endpoint used at most once.
SkeletonGraph bridge_endpoints(const SkeletonGraph& graph, double max_gap);

/// Removes endpoint branches shorter than min_len until none is left.
/// Free-standing fragments go all at once; spurs hanging off a junction go
/// one at a time, shortest first, so a fork keeps its longer arm.
SkeletonGraph prune_branches(const SkeletonGraph& graph, std::size_t min_len);

/// prune -> bridge -> prune.
SkeletonGraph clean_skeleton(const SkeletonGraph& graph, const SkeletonParams& params);

/// Thinning shortens every open end by about half the shape's width. Each
/// endpoint is pushed along the direction from the pixel `lookback` steps
/// back until it leaves `mask` or touches another part of the skeleton.
SkeletonGraph extend_endpoints(const SkeletonGraph& graph, const Raster& mask, std::size_t lookback);

/// thin -> build_graph -> clean_skeleton -> extend_endpoints.
SkeletonGraph skeleton_graph(const Raster& binary, const SkeletonParams& params);

/// Pixel-space JSON: {"width","height","nodes":[...],"branches":[...]}.
std::string to_json(const SkeletonGraph& graph);

}  // namespace roadex
