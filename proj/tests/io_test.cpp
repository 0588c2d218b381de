// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "vineskel/error.hpp"
#include "vineskel/image_io.hpp"
#include "vineskel/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

namespace vineskel {
namespace {

using testing::Gen;

std::size_t parse_offset(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.byte_offset();
  }
  ADD_FAILURE() << "no ParseError";
  return 0;
}

TEST(SkeletonJson, RoundTripIsExact) {
  Gen g(1);
  auto sk = g.skeleton(20, 30, -1, 1, 0.001, 0.02);
  sk.segments[3].edge_id = 7;
  sk.segments[4].cluster_id = 2;
  const auto back = skeleton_from_json(skeleton_to_json(sk));
  ASSERT_EQ(back.endpoints, sk.endpoints);
  ASSERT_EQ(back.segments.size(), sk.segments.size());
  for (std::size_t s = 0; s < sk.segments.size(); ++s) {
    EXPECT_EQ(back.segments[s].a, sk.segments[s].a);
    EXPECT_EQ(back.segments[s].b, sk.segments[s].b);
    EXPECT_EQ(back.segments[s].radius, sk.segments[s].radius);
    EXPECT_EQ(back.segments[s].edge_id, sk.segments[s].edge_id);
    EXPECT_EQ(back.segments[s].cluster_id, sk.segments[s].cluster_id);
  }
  EXPECT_EQ(skeleton_to_json(back), skeleton_to_json(sk));
}

TEST(SkeletonJson, Errors) {
  EXPECT_THROW(skeleton_from_json("{\"version\": \"other/9\", \"endpoints\": [], \"segments\": []}"), ParseError);
  EXPECT_THROW(skeleton_from_json(R"({"version": "vineskel-skeleton/1", "endpoints": [[0,0,0]],
      "segments": [{"a": 0, "b": 3, "radius": 0.01, "edge_id": 0, "cluster_id": 0}]})"),
               ParseError);
  // Syntax errors carry the byte offset of the failure.
  const std::string text = "{\"version\": \"vineskel-skeleton/1\", \"endpoints\": [1,,]}";
  EXPECT_EQ(parse_offset([&] { skeleton_from_json(text); }), text.find(",,") + 1);
}

TEST(CamerasJson, RoundTrip) {
  CameraModel a;
  a.fx = 512.5;
  a.pose = axis_angle({0.2, 1, 0}, 0.3, {1, 2, 3});
  CameraModel b;
  b.width = 100;
  b.height = 80;
  b.cx = 50;
  b.cy = 40;
  const auto back = cameras_from_json(cameras_to_json({a, b}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].fx, 512.5);
  EXPECT_LT((back[0].pose.rotation - a.pose.rotation).norm(), 1e-15);
  EXPECT_EQ(back[0].pose.translation, a.pose.translation);
  EXPECT_EQ(back[1].width, 100);
  EXPECT_THROW(cameras_from_json("[{\"fx\": 1}]"), ParseError);
}

TEST(FrameRecords, ResolveRelativeFiles) {
  const auto dir = testing::scratch_dir("frames");
  std::ofstream(dir / "poses.json") << R"([
    {"camera_id": 2, "pose": [1,0,0,0, 0,1,0,0, 0,0,1,0.5, 0,0,0,1], "file": "f0.ply", "sequence": "horizontal"},
    {"camera_id": 3, "pose": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "file": "/abs/f1.ply", "sequence": "vertical"}
  ])";
  const auto recs = read_frame_records(dir / "poses.json");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].file, dir / "f0.ply");
  EXPECT_EQ(recs[0].camera_id, 2);
  EXPECT_EQ(recs[0].pose.translation.z(), 0.5);
  EXPECT_EQ(recs[1].file, std::filesystem::path("/abs/f1.ply"));
  EXPECT_EQ(recs[1].sequence, Sequence::vertical);
  std::ofstream(dir / "bad.json") << R"([{"camera_id": 0, "pose": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1], "sequence": "sideways"}])";
  EXPECT_THROW(read_frame_records(dir / "bad.json"), ParseError);
}

TEST(FeaturesCsv, RoundTripWithUnknownWeight) {
  VineFeatures a;
  a.vine_id = "r3v7";
  a.cane_voxels = 1234;
  a.cordon_voxels = 321;
  a.pole_distance = 0.375;
  a.skeleton_length = 6.125;
  a.cane_pixels = 45678;
  a.pruning_weight = 1.25;
  VineFeatures b = a;
  b.vine_id = "r3v8";
  b.pruning_weight.reset();
  const auto back = features_from_csv(features_to_csv({a, b}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].vine_id, "r3v7");
  EXPECT_EQ(back[0].skeleton_length, 6.125);
  EXPECT_EQ(back[0].pruning_weight, 1.25);
  EXPECT_FALSE(back[1].pruning_weight);
}

TEST(FeaturesCsv, ErrorsCarryOffsets) {
  const std::string header =
      "vine_id,cane_voxels,cordon_voxels,pole_distance_m,skeleton_length_m,cane_pixels,pruning_weight_kg\n";
  const std::string row = "v1,10,20,0.3,x5,100,\n";
  EXPECT_EQ(parse_offset([&] { features_from_csv(header + row); }), header.size() + row.find("x5"));
  EXPECT_EQ(parse_offset([&] { features_from_csv(header + "v1,1,2\n"); }), header.size());
  EXPECT_EQ(parse_offset([&] { features_from_csv("wrong,header\n"); }), 0u);
  EXPECT_THROW(features_from_csv(""), ParseError);
}

TEST(VineSpecJson, RoundTripAndUnknownKeys) {
  VineSpec s;
  s.seed = 99;
  s.loop_count = 2;
  s.noise_sigma = 0.001;
  const auto back = vine_spec_from_json(vine_spec_to_json(s));
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.loop_count, 2);
  EXPECT_EQ(back.noise_sigma, 0.001);
  EXPECT_THROW(vine_spec_from_json("{\"seed\": 1, \"n_canez\": 3}"), ParseError);
}

TEST(JsonWriters, ProduceValidDocuments) {
  IoUReport r;
  r.iou = 0.5;
  r.intersection_px = 1;
  r.union_px = 2;
  const auto j = nlohmann::json::parse(iou_report_to_json(r));
  EXPECT_EQ(j["iou"], 0.5);
  FoldReport f;
  f.folds.push_back({0.5, 0.1});
  EXPECT_NO_THROW((void)nlohmann::json::parse(fold_report_to_json(f)));
  SpatialGraph g({{0, 0, 0}, {1, 0, 0}}, {{0, 1, 1.0}});
  const auto gj = nlohmann::json::parse(graph_to_json(g));
  EXPECT_EQ(gj["edges"].size(), 1u);
  EXPECT_EQ(gj["nodes"].size(), 2u);
}

TEST(MaskFiles, SortedImagesOnly) {
  const auto dir = testing::scratch_dir("mask_files");
  write_mask_png(dir / "b.png", Mask(2, 2));
  write_mask_pgm(dir / "a.pgm", Mask(2, 2));
  std::ofstream(dir / "notes.txt") << "x";
  const auto files = list_mask_files(dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.pgm");
  EXPECT_EQ(files[1].filename(), "b.png");
}

}  // namespace
}  // namespace vineskel
