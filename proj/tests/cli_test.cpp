// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Drives the roadex binary as a subprocess.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "roadex/cloud.hpp"
#include "roadex/ply.hpp"
#include "tempdir.hpp"

namespace roadex {
namespace {

using testing::slurp;
using testing::TempDir;

// Runs the tool with stdout sent to `out` (or discarded) and stderr dropped.
int run(const std::string& args, const std::filesystem::path& out = "/dev/null") {
  const std::string cmd = std::string(ROADEX_BIN) + " " + args + " >" + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

PointCloud unit_grid(int nx, int ny, float x0) {
  PointCloud c;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) c.push_back({x0 + float(x), float(y), 0.0f});
  return c;
}

double iou_of(const std::filesystem::path& json) { return nlohmann::json::parse(slurp(json))["iou"].get<double>(); }

class CliScene : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    ASSERT_EQ(run("synth --kind straight --extent 60 --density 20 --buildings 2 --trees 4 --out " +
                  q(*dir_ / "scene.ply") + " --truth " + q(*dir_ / "truth.ply") + " --mask " +
                  q(*dir_ / "mask.png")),
              0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::filesystem::path scene() { return *dir_ / "scene.ply"; }
  static TempDir* dir_;
};
TempDir* CliScene::dir_ = nullptr;

TEST(Cli, HelpOnEverySubcommand) {
  EXPECT_EQ(run("--help"), 0);
  for (const char* sub : {"extract", "evaluate", "stitch", "synth"}) {
    TempDir d;
    EXPECT_EQ(run(std::string(sub) + " --help", d / "help.txt"), 0) << sub;
    EXPECT_NE(slurp(d / "help.txt").find("Usage"), std::string::npos) << sub;
  }
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run(""), 3); }

TEST(Cli, UnreadableInputExitsTwoWithoutArtifacts) {
  TempDir d;
  EXPECT_EQ(run("extract /nonexistent/cloud.ply -o " + q(d / "out")), 2);
  EXPECT_FALSE(std::filesystem::exists(d / "out"));

  std::ofstream(d / "junk.ply") << "not a ply file\n";
  EXPECT_EQ(run("extract " + q(d / "junk.ply") + " -o " + q(d / "out")), 2);
  EXPECT_FALSE(std::filesystem::exists(d / "out"));
}

TEST(Cli, UnknownConfigKeyExitsThree) {
  TempDir d;
  std::ofstream(d / "bad.cfg") << "[raster]\nblur = 3\n";
  EXPECT_EQ(run("extract /nonexistent/cloud.ply -c " + q(d / "bad.cfg")), 3);
  EXPECT_EQ(run("extract /nonexistent/cloud.ply --set raster.blur=3"), 3);
  EXPECT_EQ(run("extract /nonexistent/cloud.ply --sigma -1"), 3);
}

TEST(Cli, EvaluateIdentities) {
  TempDir d;
  write_ply(unit_grid(10, 10, 0), d / "a.ply");
  write_ply(unit_grid(10, 10, 5), d / "b.ply");
  write_ply(unit_grid(10, 10, 500), d / "far.ply");
  ASSERT_EQ(run("evaluate " + q(d / "a.ply") + " " + q(d / "a.ply"), d / "same.json"), 0);
  EXPECT_EQ(iou_of(d / "same.json"), 1.0);
  ASSERT_EQ(run("evaluate " + q(d / "a.ply") + " " + q(d / "far.ply"), d / "far.json"), 0);
  EXPECT_EQ(iou_of(d / "far.json"), 0.0);
  ASSERT_EQ(run("evaluate " + q(d / "a.ply") + " " + q(d / "b.ply"), d / "half.json"), 0);
  EXPECT_NEAR(iou_of(d / "half.json"), 0.333, 0.001);
}

TEST(Cli, EvaluateMissingFileExitsTwo) {
  TempDir d;
  write_ply(unit_grid(3, 3, 0), d / "a.ply");
  EXPECT_EQ(run("evaluate " + q(d / "a.ply") + " /nonexistent/b.ply"), 2);
}

TEST_F(CliScene, ExtractWritesArtifactsAndManifest) {
  TempDir d;
  ASSERT_EQ(run("extract " + q(scene()) + " -q -o " + q(d / "out")), 0);
  for (const char* name : {"ground.ply", "road.ply", "skeleton.png", "skeleton.pgw", "centerlines.json",
                           "stages.json", "MANIFEST"}) {
    EXPECT_TRUE(std::filesystem::exists(d / "out" / name)) << name;
  }
  const auto stages = nlohmann::json::parse(slurp(d / "out" / "stages.json"));
  EXPECT_EQ(stages["stages"].size(), 8u);
  EXPECT_GE(stages["summary"]["reduction"].get<double>(), 50.0);
  EXPECT_NE(slurp(d / "out" / "MANIFEST").find("status: ok"), std::string::npos);

  ASSERT_EQ(run("evaluate " + q(d / "out" / "road.ply") + " " + q(*dir_ / "truth.ply"), d / "iou.json"), 0);
  EXPECT_GE(iou_of(d / "iou.json"), 0.8);
  ASSERT_EQ(run("evaluate " + q(d / "out" / "road.ply") + " " + q(*dir_ / "mask.png") + " --overlay " +
                    q(d / "overlay.png"),
                d / "mask.json"),
            0);
  EXPECT_GE(iou_of(d / "mask.json"), 0.5);
  EXPECT_TRUE(std::filesystem::exists(d / "overlay.png"));
}

TEST_F(CliScene, StageFailureExitsFourWithManifest) {
  TempDir d;
  EXPECT_EQ(run("extract " + q(scene()) + " -q --min-branch 100000 -o " + q(d / "out")), 4);
  const std::string manifest = slurp(d / "out" / "MANIFEST");
  EXPECT_NE(manifest.find("status: failed"), std::string::npos);
  EXPECT_NE(manifest.find("failed_stage: skeleton"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(d / "out" / "ground.ply"));
  EXPECT_FALSE(std::filesystem::exists(d / "out" / "road.ply"));
}

TEST_F(CliScene, DumpConfigRoundTrip) {
  TempDir d;
  ASSERT_EQ(run("extract --dump-config --sigma 4 --seed 11", d / "run.cfg"), 0);
  EXPECT_NE(slurp(d / "run.cfg").find("raster.sigma = 4"), std::string::npos);
  ASSERT_EQ(run("extract " + q(scene()) + " -q --no-timing --sigma 4 --seed 11 -o " + q(d / "a")), 0);
  ASSERT_EQ(run("extract " + q(scene()) + " -q --no-timing -c " + q(d / "run.cfg") + " -o " + q(d / "b")), 0);
  EXPECT_EQ(slurp(d / "a" / "stages.json"), slurp(d / "b" / "stages.json"));
  EXPECT_EQ(slurp(d / "a" / "road.ply"), slurp(d / "b" / "road.ply"));
  EXPECT_EQ(slurp(d / "a" / "centerlines.json"), slurp(d / "b" / "centerlines.json"));
}

TEST(Cli, SynthRejectsUnknownKind) {
  TempDir d;
  EXPECT_EQ(run("synth --kind spiral --out " + q(d / "s.ply")), 3);
}

TEST(Cli, StitchFixtureTiles) {
  TempDir d;
  const std::string tiles = q(std::filesystem::path(ROADEX_FIXTURES) / "tiles");
  ASSERT_EQ(run("stitch --bounds -50,-80,50,80 --zoom 2 --tiles " + tiles + " --out " + q(d / "map.png") +
                " --mask " + q(d / "mask.png")),
            0);
  for (const char* name : {"map.png", "map.pgw", "mask.png", "mask.pgw"}) {
    EXPECT_TRUE(std::filesystem::exists(d / name)) << name;
  }
  EXPECT_EQ(run("stitch --bounds -50,-80,50,80 --zoom 2 --tiles /nonexistent --out " + q(d / "x.png")), 2);
  EXPECT_EQ(run("stitch --bounds nonsense --zoom 2 --tiles " + tiles + " --out " + q(d / "x.png")), 3);
}

}  // namespace
}  // namespace roadex
