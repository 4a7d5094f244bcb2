// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/ply.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "oracles.hpp"
#include "tempdir.hpp"
#include "roadex/errors.hpp"

namespace roadex {
namespace {

namespace fs = std::filesystem;

using testing::slurp;

class PlyFile : public ::testing::Test {
 protected:
  fs::path file(const std::string& name) const { return dir_ / name; }
  testing::TempDir dir_;
};

constexpr const char* kTwoVertices =
    "ply\nformat ascii 1.0\ncomment two\nelement vertex 2\n"
    "property float x\nproperty float y\nproperty float z\nend_header\n"
    "0 0 0\n1 2 3\n";

TEST(ParsePly, AsciiTwoVertices) {
  const auto c = parse_ply(kTwoVertices);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Point3{0, 0, 0}));
  EXPECT_EQ(c[1], (Point3{1, 2, 3}));
  EXPECT_FALSE(c.has_intensity());
}

TEST(ParsePly, ZeroVertices) {
  const auto c = parse_ply(
      "ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\nproperty float z\nend_header\n");
  EXPECT_TRUE(c.empty());
}

TEST(ParsePly, ExtraPropertiesAndElementsAreSkipped) {
  const auto c = parse_ply(
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty double z\nproperty uchar red\nproperty double x\n"
      "property float intensity\nproperty double y\nelement face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n3 255 1 0.5 2\n6 0 4 0.25 5\n3 0 1 2\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1], (Point3{4, 5, 6}));
  EXPECT_EQ(c.intensity()[0], 0.5f);
}

TEST(ParsePly, HeaderErrorsCarryOffset) {
  try {
    parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nbogus line\nend_header\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 55u);
  }
  EXPECT_THROW(parse_ply("plx\n"), ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"), ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n"),
               ParseError);
}

TEST(ParsePly, Truncated) {
  try {
    parse_ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
              "end_header\n1 2 3\n");
    FAIL();
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.expected(), 3u);
    EXPECT_EQ(e.found(), 1u);
  }
}

TEST(ParsePly, NonFiniteNamesVertex) {
  try {
    parse_ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
              "end_header\n1 2 3\n1 2 3\nnan 0 0\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST_F(PlyFile, BinaryRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  const PointCloud c = testing::random_cloud(rng, 1000, 1e4, 100.0);
  write_ply(c, file("a.ply"));
  EXPECT_EQ(read_ply(file("a.ply")), c);
}

TEST_F(PlyFile, AsciiRoundTripIsBitExact) {
  std::mt19937_64 rng(2);
  PointCloud c = testing::random_cloud(rng, 200, 1e3, 10.0);
  c.push_back({1e-7f, -3.4e38f, 123456.789f}, 2.5f);
  write_ply(c, file("a.ply"), PlyFormat::ascii);
  EXPECT_EQ(read_ply(file("a.ply")), c);
}

TEST_F(PlyFile, EmptyCloud) {
  write_ply(PointCloud{}, file("e.ply"));
  EXPECT_NE(slurp(file("e.ply")).find("element vertex 0\n"), std::string::npos);
  EXPECT_TRUE(read_ply(file("e.ply")).empty());
}

TEST_F(PlyFile, AsciiHasOneLinePerVertex) {
  write_ply(PointCloud({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}), file("t.ply"), PlyFormat::ascii);
  const std::string s = slurp(file("t.ply"));
  const std::string body = s.substr(s.find("end_header\n") + 11);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 3);
}

TEST_F(PlyFile, BinarySizeIsTwelveBytesPerVertex) {
  std::mt19937_64 rng(5);
  const PointCloud c = testing::random_cloud(rng, 100000, 100.0, 10.0);
  write_ply(c, file("b.ply"));
  const std::string s = slurp(file("b.ply"));
  const std::size_t header = s.find("end_header\n") + 11;
  EXPECT_EQ(fs::file_size(file("b.ply")), header + 12u * 100000u);
}

TEST_F(PlyFile, MissingFileIsIoError) { EXPECT_THROW(read_ply(file("missing.ply")), IoError); }

TEST_F(PlyFile, BinaryTruncation) {
  write_ply(PointCloud({{0, 0, 0}, {1, 1, 1}}), file("t.ply"));
  std::string s = slurp(file("t.ply"));
  s.resize(s.size() - 5);
  EXPECT_THROW(parse_ply(s), TruncationError);
}

}  // namespace
}  // namespace roadex
