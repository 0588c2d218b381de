// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "vineskel/error.hpp"
#include "vineskel/image_io.hpp"
#include "vineskel/io.hpp"
#include "vineskel/pipeline.hpp"
#include "vineskel/ply.hpp"
#include "vineskel/synth.hpp"

#include <gtest/gtest.h>

#include <cstdio>

namespace vineskel {
namespace {

VineSpec clean_spec(std::uint64_t seed) {
  VineSpec s;
  s.seed = seed;
  s.noise_sigma = 0.0;
  return s;
}

TEST(Skeletonize, EmptyCloud) {
  const auto r = skeletonize(PointCloud{});
  EXPECT_TRUE(r.skeleton.empty());
  EXPECT_TRUE(r.topologies.empty());
}

TEST(Skeletonize, CleanVineIsOneTree) {
  const auto v = generate_vine(clean_spec(2));
  const auto r = skeletonize(v.cloud);
  ASSERT_FALSE(r.skeleton.empty());
  EXPECT_EQ(count_clusters(r.skeleton), 1u);
  EXPECT_EQ(r.topologies.size(), 1u);
  EXPECT_EQ(r.segment_support.size(), r.skeleton.segments.size());
  EXPECT_EQ(r.mst.edge_count() + 1, r.mst.node_count());
  for (const auto& s : r.skeleton.segments) EXPECT_GE(s.radius, 0.0005);
  const auto score = score_against_truth(r.skeleton, v.truth);
  EXPECT_LT(score.centerline_rms, 0.01);
}

TEST(Skeletonize, ClosureOffGivesNoCycles) {
  VineSpec spec = clean_spec(4);
  spec.loop_count = 1;
  const auto v = generate_vine(spec);
  SkeletonizeParams p;
  p.close_cycles = false;
  const auto r = skeletonize(v.cloud, p);
  EXPECT_EQ(r.closure_edges, 0u);
  for (const auto& t : r.topologies) EXPECT_EQ(t.cycle_rank(), 0u);
}

TEST(Skeletonize, ThreadCountDoesNotChangeResult) {
  const auto v = generate_vine(clean_spec(6));
  const auto a = skeletonize(v.cloud, {}, 1), b = skeletonize(v.cloud, {}, 3);
  EXPECT_EQ(skeleton_to_json(a.skeleton), skeleton_to_json(b.skeleton));
}

TEST(Skeletonize, ValidatesParams) {
  SkeletonizeParams p;
  p.graph.r_s = 0.0;
  EXPECT_THROW(skeletonize(PointCloud{}, p), InvalidParameter);
}

TEST(SelectVinePoints, LabelsOrEverything) {
  PointCloud c;
  c.points.push_back(Point{{0, 0, 0}, {}, {}, {}});
  c.points.push_back(Point{{1, 0, 0}, {}, {}, {}});
  EXPECT_EQ(select_vine_points(c, {Label::cane}).size(), 2u);
  c.points[0].label = Label::leaf;
  c.points[1].label = Label::cane;
  const auto s = select_vine_points(c, {Label::cane});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.points[0].position.x(), 1.0);
}

PipelineConfig write_inputs(const std::filesystem::path& dir, std::uint64_t seed) {
  const auto v = generate_vine(clean_spec(seed));
  write_ply(dir / "vine.ply", v.cloud);
  write_text(dir / "cams.json", cameras_to_json(v.cameras));
  for (std::size_t k = 0; k < v.masks.size(); ++k)
    write_mask_png(dir / "masks" / ("view_" + std::to_string(k) + ".png"), v.masks[k]);
  PipelineConfig c;
  c.cloud = dir / "vine.ply";
  c.cams = dir / "cams.json";
  c.masks = dir / "masks";
  c.out_dir = dir / "out";
  c.pole_distance = v.truth.pole_distance;
  return c;
}

TEST(RunPipeline, WritesEveryArtifact) {
  const auto dir = testing::scratch_dir("pipeline_run");
  auto c = write_inputs(dir, 3);
  c.overlays = true;
  c.refine_masks = true;
  const auto art = run_pipeline(c);
  for (const char* name : {"graph_local.json", "graph_mst.json", "graph_closed.json", "graph_smooth.json", "topology.json",
                           "skeleton.json", "iou.json", "features.csv"})
    EXPECT_TRUE(std::filesystem::exists(c.out_dir / name)) << name;
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "overlays" / "view_000.png"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "masks_refined" / "view_0.png"));
  EXPECT_GT(art.iou.iou, 0.5);
  const auto rows = read_features(c.out_dir / "features.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].vine_id, "vine");
  EXPECT_GT(rows[0].skeleton_length, 0.5);
  EXPECT_EQ(skeleton_to_json(read_skeleton(c.out_dir / "skeleton.json")), skeleton_to_json(art.skeleton.skeleton));
}

TEST(RunPipeline, FailuresNameTheStage) {
  const auto dir = testing::scratch_dir("pipeline_fail");
  auto c = write_inputs(dir, 5);
  c.cloud = dir / "missing.ply";
  try {
    run_pipeline(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
  }
  c = write_inputs(dir, 5);
  std::filesystem::remove(dir / "masks" / "view_1.png");
  try {
    run_pipeline(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "masks");
  }
  c.threads = 0;
  try {
    run_pipeline(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(RunPipeline, RegistersFrames) {
  const auto dir = testing::scratch_dir("pipeline_frames");
  const auto v = generate_vine(clean_spec(7));
  // Two frames observing the same vine from known, exact placements.
  const auto cam0 = axis_angle({0, 0, 1}, 0.0, {0, -1, 1});
  const auto cam1 = axis_angle({0, 0, 1}, 0.2, {0.3, -1, 1});
  for (int k = 0; k < 2; ++k) {
    const auto& pose = k == 0 ? cam0 : cam1;
    PointCloud local = v.cloud;
    for (auto& p : local.points) p.position = pose.inverse().apply(p.position);
    write_ply(dir / ("f" + std::to_string(k) + ".ply"), local);
  }
  auto pose_json = [](const RigidTransform& t) {
    std::string s = "[";
    const auto m = t.to_row_major();
    char buf[32];
    for (std::size_t i = 0; i < 16; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m[i]);
      s += (i ? "," : "") + std::string(buf);
    }
    return s + "]";
  };
  write_text(dir / "frames.json", "[{\"camera_id\": 0, \"pose\": " + pose_json(cam0) +
                                      ", \"file\": \"f0.ply\", \"sequence\": \"horizontal\"},"
                                      "{\"camera_id\": 1, \"pose\": " + pose_json(cam1) +
                                      ", \"file\": \"f1.ply\", \"sequence\": \"horizontal\"}]");
  PipelineConfig c;
  c.frames = dir / "frames.json";
  c.out_dir = dir / "out";
  c.discard_far = false;
  const auto art = run_pipeline(c);
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "registered.ply"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "poses.json"));
  EXPECT_EQ(read_ply(c.out_dir / "registered.ply").size(), 2 * v.cloud.size());
  EXPECT_FALSE(art.skeleton.skeleton.empty());
}

}  // namespace
}  // namespace vineskel
