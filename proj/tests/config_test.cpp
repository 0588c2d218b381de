// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/config.hpp"
#include "vineskel/error.hpp"

#include <gtest/gtest.h>

namespace vineskel {
namespace {

std::size_t offset_of(const std::string& text) {
  try {
    parse_config(text, {}, "cfg.toml");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "cfg.toml");
    return e.byte_offset();
  }
  ADD_FAILURE() << "no ParseError";
  return 0;
}

TEST(Config, DefaultsDocumentParsesToDefaults) {
  const auto c = parse_config(default_config_toml());
  const PipelineConfig d;
  EXPECT_EQ(c.skeleton.voxel_size, d.skeleton.voxel_size);
  EXPECT_EQ(c.skeleton.graph.r_s, d.skeleton.graph.r_s);
  EXPECT_EQ(c.skeleton.graph.delta_l, d.skeleton.graph.delta_l);
  EXPECT_EQ(c.skeleton.graph.delta_b, d.skeleton.graph.delta_b);
  EXPECT_EQ(c.skeleton.fit.motion_tol, d.skeleton.fit.motion_tol);
  EXPECT_EQ(c.skeleton.fit.batch_limit, d.skeleton.fit.batch_limit);
  EXPECT_EQ(c.icp.tol, d.icp.tol);
  EXPECT_EQ(c.distance_margin, d.distance_margin);
  EXPECT_EQ(c.skeleton_labels, d.skeleton_labels);
  EXPECT_EQ(c.threads, d.threads);
  EXPECT_EQ(c.out_dir, d.out_dir);
}

TEST(Config, ReadsValuesAndResolvesPaths) {
  const auto c = parse_config(R"(
[input]
cloud = "scans/vine.ply"
cams = "/abs/cams.json"
masks = "masks"
pole_distance = 0.4
pruning_weight = 2

[skeleton]
labels = ["cane"]
delta_l = 0.3
root = "index:12"
close_cycles = false
batch_limit = 500

[run]
threads = 4
)",
                              "/data/cfg");
  EXPECT_EQ(c.cloud, std::filesystem::path("/data/cfg/scans/vine.ply"));
  EXPECT_EQ(c.cams, std::filesystem::path("/abs/cams.json"));
  EXPECT_EQ(c.pole_distance, 0.4);
  EXPECT_EQ(c.pruning_weight, 2.0);
  EXPECT_EQ(c.skeleton_labels, std::vector<Label>{Label::cane});
  EXPECT_EQ(c.skeleton.graph.delta_l, 0.3);
  EXPECT_EQ(c.skeleton.root.strategy, RootStrategy::index);
  EXPECT_EQ(c.skeleton.root.index, 12u);
  EXPECT_FALSE(c.skeleton.close_cycles);
  EXPECT_EQ(c.skeleton.fit.batch_limit, 500u);
  EXPECT_EQ(c.threads, 4);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, UnknownKeyReportsItsLine) {
  const std::string head = "[skeleton]\nvoxel_size = 0.02\n";
  const std::string text = head + "voxle_size = 0.03\n";
  const auto off = offset_of(text);
  EXPECT_GE(off, head.size());
  EXPECT_LT(off, text.size());
}

TEST(Config, UnknownTableAndBadTypes) {
  EXPECT_EQ(offset_of("[skeletn]\nr_s = 1\n"), 0u);
  const std::string t = "[run]\nthreads = \"many\"\n";
  EXPECT_EQ(offset_of(t), t.find('"'));
  EXPECT_GE(offset_of("[run]\nthreads = -2\n"), 6u);
  EXPECT_GT(offset_of("[skeleton]\nlabels = [\"cane\", \"twig\"]\n"), 11u);
}

TEST(Config, SyntaxErrorOffset) {
  const std::string head = "[input]\nvine_id = \"a\"\n";
  const auto off = offset_of(head + "pole_distance = = 3\n");
  EXPECT_GE(off, head.size());
}

TEST(Config, ValidationRejectsRanges) {
  auto c = parse_config("[input]\ncloud = \"x.ply\"\n");
  EXPECT_NO_THROW(c.validate());
  c.skeleton.voxel_size = 0;
  EXPECT_THROW(c.validate(), InvalidParameter);
  c = parse_config("[input]\ncloud = \"x.ply\"\ncams = \"c.json\"\n");
  EXPECT_THROW(c.validate(), InvalidParameter);
  EXPECT_THROW(parse_config("").validate(), InvalidParameter);
  EXPECT_THROW(parse_config("[skeleton]\nroot = \"highest\"\n"), InvalidParameter);
}

TEST(Config, RootStrategyNames) {
  for (const char* name : {"min-z", "max-degree", "index:0", "index:42"})
    EXPECT_EQ(root_strategy_name(parse_root_strategy(name)), name);
  EXPECT_THROW(parse_root_strategy("index:"), InvalidParameter);
  EXPECT_THROW(parse_root_strategy("index:4x"), InvalidParameter);
}

}  // namespace
}  // namespace vineskel
