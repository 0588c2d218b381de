// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "vineskel/error.hpp"
#include "vineskel/ply.hpp"

#include <gtest/gtest.h>

#include <cstring>

namespace vineskel {
namespace {

PointCloud sample_cloud() {
  testing::Gen g(3);
  PointCloud c;
  for (int i = 0; i < 50; ++i) {
    Point p;
    p.position = g.point(-2, 2);
    if (i % 3 != 0) p.label = static_cast<Label>(i % kLabelCount);
    if (i % 4 != 0) p.camera_id = static_cast<std::uint8_t>(i % 7);
    if (i % 5 != 0) p.camera_distance = 0.25 * (i % 9);
    c.points.push_back(p);
  }
  return c;
}

void expect_same(const PointCloud& a, const PointCloud& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i].position, b.points[i].position) << i;
    EXPECT_EQ(a.points[i].label, b.points[i].label) << i;
    EXPECT_EQ(a.points[i].camera_id, b.points[i].camera_id) << i;
    EXPECT_EQ(a.points[i].camera_distance, b.points[i].camera_distance) << i;
  }
}

TEST(Ply, BinaryRoundTrip) {
  const auto c = sample_cloud();
  expect_same(c, parse_ply(serialize_ply(c, PlyFormat::binary_little_endian)));
}

TEST(Ply, AsciiRoundTrip) {
  const auto c = sample_cloud();
  expect_same(c, parse_ply(serialize_ply(c, PlyFormat::ascii)));
}

TEST(Ply, FloatPropertiesAndUnknownIgnored) {
  const std::string text =
      "ply\nformat ascii 1.0\ncomment made by hand\n"
      "element vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty uchar label\n"
      "element face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n"
      "0.5 1 2 200 1\n"
      "3 4 5 10 2\n"
      "3 0 1 1\n";
  const auto c = parse_ply(text);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[0].position, Eigen::Vector3d(0.5, 1, 2));
  EXPECT_EQ(c.points[0].label, Label::cane);
  EXPECT_EQ(c.points[1].label, Label::cordon);
  EXPECT_FALSE(c.points[1].camera_id);
}

TEST(Ply, BinaryFloat32) {
  std::string bytes = "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
                      "property float x\nproperty float y\nproperty float z\nend_header\n";
  const float v[3] = {1.5f, -2.25f, 0.125f};
  bytes.append(reinterpret_cast<const char*>(v), sizeof v);
  const auto c = parse_ply(bytes);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.points[0].position, Eigen::Vector3d(1.5, -2.25, 0.125));
}

TEST(Ply, EmptyVertexElement) {
  const auto c = parse_ply("ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\n"
                           "property float z\nend_header\n");
  EXPECT_TRUE(c.empty());
}

std::size_t offset_of(const std::string& bytes) {
  try {
    parse_ply(bytes, "bad.ply");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "bad.ply");
    return e.byte_offset();
  }
  ADD_FAILURE() << "no ParseError";
  return 0;
}

TEST(Ply, MalformedNumberReportsByteOffset) {
  const std::string header = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                             "property float z\nend_header\n";
  const std::string body = "1 2 3\n4 oops 6\n";
  EXPECT_EQ(offset_of(header + body), header.size() + 8);
}

TEST(Ply, TruncatedBinaryReportsOffset) {
  std::string bytes = "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
                      "property double x\nproperty double y\nproperty double z\nend_header\n";
  const auto header = bytes.size();
  const double v[4] = {1, 2, 3, 4};
  bytes.append(reinterpret_cast<const char*>(v), sizeof v);
  EXPECT_EQ(offset_of(bytes), header + 32);
}

TEST(Ply, HeaderErrors) {
  EXPECT_EQ(offset_of("plx\n"), 0u);
  const std::string bad_kw = "ply\nformat ascii 1.0\n";
  EXPECT_EQ(offset_of(bad_kw + "bogus line\nend_header\n"), bad_kw.size());
  EXPECT_THROW(parse_ply("ply\nformat binary_big_endian 1.0\nend_header\n"), ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n1\n"), ParseError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\n"), ParseError);
}

TEST(Ply, MissingFile) { EXPECT_THROW(read_ply("/nonexistent/nowhere.ply"), ParseError); }

TEST(Ply, FileRoundTrip) {
  const auto dir = testing::scratch_dir("ply");
  const auto c = sample_cloud();
  write_ply(dir / "c.ply", c);
  expect_same(c, read_ply(dir / "c.ply"));
}

}  // namespace
}  // namespace vineskel
