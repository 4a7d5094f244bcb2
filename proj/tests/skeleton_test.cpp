// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/skeleton.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "roadex/errors.hpp"

namespace roadex {
namespace {

using testing::blank;

void hline(Raster& r, int y, int x0, int x1) {
  for (int x = x0; x <= x1; ++x) r.at(x, y) = 1.0;
}
void vline(Raster& r, int x, int y0, int y1) {
  for (int y = y0; y <= y1; ++y) r.at(x, y) = 1.0;
}
void diag(Raster& r, Pixel from, int dx, int dy, int n) {
  for (int i = 0; i < n; ++i) r.at(from.x + i * dx, from.y + i * dy) = 1.0;
}
void rect(Raster& r, int x0, int y0, int x1, int y1) {
  for (int y = y0; y <= y1; ++y) hline(r, y, x0, x1);
}

bool subset(const Raster& a, const Raster& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.values()[i] != 0.0 && b.values()[i] == 0.0) return false;
  }
  return true;
}

std::pair<int, int> x_range(const Raster& r) {
  int lo = r.width(), hi = -1;
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      if (r.at(x, y) != 0.0) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
  return {lo, hi};
}

Raster ring(int size, double radius) {
  Raster r = blank(size, size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < 2000; ++i) {
    const double t = 2 * std::numbers::pi * i / 2000.0;
    r.at(static_cast<int>(std::lround(c + radius * std::cos(t))), static_cast<int>(std::lround(c + radius * std::sin(t)))) = 1.0;
  }
  return thin(r);
}

TEST(Thin, SinglePixel) {
  Raster r = blank(5, 5);
  r.at(2, 2) = 1.0;
  EXPECT_EQ(thin(r), r);
}

TEST(Thin, BarShrinksToCentreLine) {
  Raster r = blank(70, 15);
  rect(r, 10, 5, 59, 9);
  const Raster s = thin(r);
  EXPECT_TRUE(subset(s, r));
  EXPECT_EQ(count_components(s), 1u);
  const auto g = build_graph(s);
  EXPECT_EQ(g.endpoint_count(), 2u);
  EXPECT_EQ(g.junction_count(), 0u);
  EXPECT_NEAR(static_cast<double>(s.count_nonzero()), 50.0, 4.0);
}

TEST(Thin, PlusHasFourEnds) {
  Raster r = blank(60, 60);
  rect(r, 5, 28, 54, 32);
  rect(r, 28, 5, 32, 54);
  const auto g = build_graph(thin(r));
  EXPECT_EQ(g.endpoint_count(), 4u);
  EXPECT_GE(g.junction_count(), 1u);
}

TEST(Thin, RandomBlobProperties) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Raster r = testing::random_blobs(rng, 128);
    const Raster s = thin(r);
    EXPECT_TRUE(subset(s, r)) << trial;
    EXPECT_EQ(testing::components_oracle(s), testing::components_oracle(r)) << trial;
    EXPECT_EQ(count_components(s), testing::components_oracle(s)) << trial;
    EXPECT_EQ(thin(s), s) << trial;
    SkeletonGraph g;
    ASSERT_NO_THROW(g = build_graph(s)) << trial;
    for (int y = 0; y < s.height(); ++y)
      for (int x = 0; x < s.width(); ++x)
        if (s.at(x, y) != 0.0) EXPECT_LE(neighbor_count(s, x, y), 8);
  }
}

TEST(Graph, StraightLine) {
  Raster r = blank(40, 5);
  hline(r, 2, 5, 34);
  const auto g = build_graph(r);
  EXPECT_EQ(g.branches.size(), 1u);
  EXPECT_EQ(g.endpoint_count(), 2u);
  EXPECT_EQ(g.junction_count(), 0u);
  EXPECT_EQ(g.length(g.branches[0]), 30u);
  EXPECT_EQ(g.path(g.branches[0]).size(), 30u);
  EXPECT_EQ(g.to_raster(), r);
}

TEST(Graph, TShape) {
  Raster r = blank(41, 31);
  hline(r, 10, 0, 40);
  vline(r, 20, 11, 30);
  const auto g = build_graph(r);
  EXPECT_EQ(g.endpoint_count(), 3u);
  EXPECT_EQ(g.junction_count(), 1u);
  EXPECT_EQ(g.branches.size(), 3u);
  EXPECT_EQ(g.to_raster(), r);
  EXPECT_EQ(g.component_count(), 1u);
}

TEST(Graph, Empty) {
  const auto g = build_graph(blank(10, 10));
  EXPECT_TRUE(g.nodes.empty());
  EXPECT_TRUE(g.branches.empty());
}

TEST(Graph, ClosedLoopHasNoNodes) {
  const Raster r = ring(40, 12.0);
  const auto g = build_graph(r);
  EXPECT_EQ(g.nodes.size(), 0u);
  ASSERT_EQ(g.branches.size(), 1u);
  EXPECT_TRUE(g.branches[0].closed());
  EXPECT_EQ(g.pixel_count(), r.count_nonzero());
}

TEST(Graph, RejectsThickInput) {
  Raster r = blank(5, 5);
  rect(r, 1, 1, 2, 2);
  EXPECT_THROW(build_graph(r), ParameterError);
}

TEST(Junctions, StraightLineHasNone) {
  Raster r = blank(30, 3);
  hline(r, 1, 0, 29);
  EXPECT_TRUE(detect_junctions(r).empty());
  EXPECT_TRUE(junction_pixels(r).empty());
}

TEST(Junctions, PlusCentre) {
  Raster r = blank(41, 41);
  hline(r, 20, 10, 30);
  vline(r, 20, 10, 30);
  EXPECT_EQ(neighbor_count(r, 20, 20), 4);
  EXPECT_EQ(detect_junctions(r), (std::vector<Pixel>{{20, 20}}));
}

TEST(Junctions, YShapeIsOneCluster) {
  Raster r = blank(41, 41);
  vline(r, 20, 20, 39);
  diag(r, {19, 19}, -1, -1, 10);
  diag(r, {21, 19}, 1, -1, 10);
  r.at(20, 19) = 1.0;
  EXPECT_EQ(detect_junctions(r).size(), 1u);
  EXPECT_EQ(build_graph(r).endpoint_count(), 3u);
}

TEST(Bridge, FiveGap) {
  Raster r = blank(50, 10);
  hline(r, 5, 0, 19);
  hline(r, 5, 25, 44);
  const auto g = build_graph(r);
  EXPECT_EQ(g.component_count(), 2u);
  const auto bridged = bridge_endpoints(g, 10.0);
  EXPECT_EQ(bridged.component_count(), 1u);
  EXPECT_EQ(bridged.endpoint_count(), 2u);
  EXPECT_EQ(bridge_endpoints(g, 3.0).component_count(), 2u);
}

TEST(Bridge, ThreeFragmentsChain) {
  Raster r = blank(80, 10);
  hline(r, 5, 0, 19);
  hline(r, 5, 25, 44);
  hline(r, 5, 50, 69);
  const auto g = bridge_endpoints(build_graph(r), 10.0);
  EXPECT_EQ(g.component_count(), 1u);
  EXPECT_EQ(g.pixel_count(), 70u);
}

TEST(Bridge, ClosesRingBrokenTwice) {
  Raster r = ring(40, 12.0);
  for (int y = 0; y < 40; ++y) {
    r.at(19, y) = r.at(20, y) = 0.0;
  }
  const auto g = build_graph(r);
  ASSERT_EQ(g.component_count(), 2u);
  const auto closed = bridge_endpoints(g, 5.0);
  EXPECT_EQ(closed.component_count(), 1u);
  EXPECT_EQ(closed.endpoint_count(), 0u);
}

TEST(Prune, ShortSpurGoes) {
  Raster r = blank(100, 20);
  hline(r, 10, 0, 99);
  vline(r, 50, 11, 14);
  const auto g = prune_branches(build_graph(r), 10);
  EXPECT_EQ(g.endpoint_count(), 2u);
  EXPECT_EQ(g.junction_count(), 0u);
  Raster line = blank(100, 20);
  hline(line, 10, 0, 99);
  EXPECT_EQ(g.to_raster(), line);
}

TEST(Prune, IsolatedFragmentGoes) {
  Raster r = blank(100, 20);
  hline(r, 10, 0, 99);
  hline(r, 2, 10, 12);
  const auto g = prune_branches(build_graph(r), 10);
  EXPECT_EQ(g.pixel_count(), 100u);
  EXPECT_EQ(g.component_count(), 1u);
}

TEST(Prune, LoopSurvives) {
  const Raster r = ring(20, 6.4);
  const auto g = prune_branches(build_graph(r), 50);
  EXPECT_EQ(g.to_raster(), r);
}

TEST(Prune, ForkKeepsOneArm) {
  // A line ending in a short fork must not lose both arms, or the line
  // would end at the fork point.
  Raster r = blank(80, 40);
  hline(r, 20, 0, 60);
  diag(r, {61, 19}, 1, -1, 8);
  diag(r, {61, 21}, 1, 1, 8);
  const auto g = prune_branches(build_graph(r), 20);
  EXPECT_EQ(g.endpoint_count(), 2u);
  EXPECT_EQ(g.junction_count(), 0u);
  EXPECT_EQ(x_range(g.to_raster()).second, 68);
}

TEST(Extend, BarEndsReachTheMask) {
  Raster r = blank(100, 30);
  rect(r, 10, 10, 89, 18);
  const auto g = skeleton_graph(r, {20.0, 5, 10});
  EXPECT_EQ(g.endpoint_count(), 2u);
  const auto [lo, hi] = x_range(g.to_raster());
  EXPECT_LE(lo, 11);
  EXPECT_GE(hi, 88);
  EXPECT_TRUE(subset(g.to_raster(), r));
}

TEST(Extend, StopsAtOtherSkeleton) {
  Raster mask = blank(60, 60);
  rect(mask, 0, 28, 59, 32);
  rect(mask, 28, 0, 32, 27);
  Raster skel = blank(60, 60);
  hline(skel, 30, 0, 59);
  vline(skel, 30, 0, 20);
  const auto g = extend_endpoints(build_graph(skel), mask, 10);
  EXPECT_EQ(g.component_count(), 1u);
  EXPECT_EQ(g.junction_count(), 1u);
}

TEST(Extend, DisabledIsIdentity) {
  Raster r = blank(30, 5);
  hline(r, 2, 5, 20);
  const auto g = build_graph(r);
  EXPECT_EQ(extend_endpoints(g, blank(30, 5), 0).to_raster(), r);
  EXPECT_THROW(extend_endpoints(g, blank(3, 3), 5), ParameterError);
}

TEST(Clean, KeepsMainLine) {
  Raster r = blank(120, 30);
  rect(r, 5, 10, 114, 20);
  rect(r, 60, 21, 62, 24);
  const auto g = skeleton_graph(r, {});
  EXPECT_EQ(g.endpoint_count(), 2u);
  EXPECT_EQ(g.junction_count(), 0u);
}

TEST(SkeletonJson, HasDimensions) {
  Raster r = blank(12, 7);
  hline(r, 3, 1, 10);
  const auto j = nlohmann::json::parse(to_json(build_graph(r)));
  EXPECT_EQ(j["width"], 12);
  EXPECT_EQ(j["height"], 7);
  EXPECT_EQ(j["nodes"].size(), 2u);
  EXPECT_EQ(j["branches"].size(), 1u);
}

TEST(SkeletonParams, Validation) {
  EXPECT_THROW(validate(SkeletonParams{-1.0, 20, 10}), ParameterError);
}

}  // namespace
}  // namespace roadex
