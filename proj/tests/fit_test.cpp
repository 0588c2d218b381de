// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "oracles.hpp"
#include "vineskel/error.hpp"
#include "vineskel/fit.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace vineskel {
namespace {

using testing::Gen;

using Scene = testing::FitScene;
using testing::add_polyline;
using testing::finish_nodes;
using testing::sample_edge;

void expect_monotone(const LineFit& f) {
  ASSERT_FALSE(f.objective.empty());
  for (std::size_t k = 1; k < f.objective.size(); ++k) ASSERT_LE(f.objective[k], f.objective[k - 1]) << k;
}

double rms(const LineFit& f) { return std::sqrt(f.mse()); }

TEST(FitLines, RejectsBadInput) {
  Scene s;
  add_polyline(s, {{0, 0, 0}, {1, 0, 0}}, 0.01);
  finish_nodes(s);
  FitParams p;
  p.seg_len = 0.0;
  EXPECT_THROW(fit_lines(s.topo, {}, {}, p), InvalidParameter);
  EXPECT_THROW(fit_lines(s.topo, {{0, 0, 0}}, {}), ShapeError);
}

TEST(FitLines, EmptyTopology) {
  const auto f = fit_lines(TopologyGraph{}, {{0, 0, 0}}, {-1});
  EXPECT_TRUE(f.skeleton.empty());
  EXPECT_EQ(f.point_segment, std::vector<std::int32_t>{-1});
}

TEST(FitLines, StraightMeterGivesTenSegments) {
  Scene s;
  Gen g(1);
  add_polyline(s, {{0, 0, 0}, {1, 0, 0}}, 0.01);
  finish_nodes(s);
  sample_edge(s, g, 0, 1000, 0.0);
  const auto f = fit_lines(s.topo, s.points, s.point_edge);
  EXPECT_EQ(f.skeleton.segments.size(), 10u);
  EXPECT_EQ(f.skeleton.endpoints.size(), 11u);
  EXPECT_LT(f.mse(), 1e-10);
  EXPECT_NEAR(f.skeleton.total_length(), 1.0, 1e-9);
  for (const auto& x : f.skeleton.endpoints) EXPECT_LT(std::hypot(x.y(), x.z()), 1e-6);
  expect_monotone(f);
  EXPECT_TRUE(f.converged);
}

TEST(FitLines, SegmentCountRoundsLength) {
  for (double len : {0.03, 0.149, 0.151, 0.46}) {
    Scene s;
    add_polyline(s, {{0, 0, 0}, {0, 0, len}}, 0.005);
    finish_nodes(s);
    const auto f = fit_lines(s.topo, {}, {});
    EXPECT_EQ(f.skeleton.segments.size(), static_cast<std::size_t>(std::max(1L, std::lround(len / 0.1)))) << len;
  }
}

TEST(FitLines, CornerIsKept) {
  Scene s;
  Gen g(2);
  add_polyline(s, {{0, 0, 0}, {0.5, 0, 0}, {0.5, 0.5, 0}}, 0.01);
  finish_nodes(s);
  sample_edge(s, g, 0, 1000, 0.0);
  const auto f = fit_lines(s.topo, s.points, s.point_edge);
  EXPECT_LT(f.mse(), 1e-10);
  double best = 1.0;
  for (const auto& x : f.skeleton.endpoints) best = std::min(best, (x - Eigen::Vector3d(0.5, 0, 0)).norm());
  EXPECT_LT(best, 1e-6);
  expect_monotone(f);
}

TEST(FitLines, NoisyLineWithinBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Gen g(seed);
    Scene s;
    // The chain itself comes from noisy samples, as it would from a scan.
    std::vector<Eigen::Vector3d> corners;
    for (int k = 0; k <= 50; ++k) corners.push_back({0.02 * k, g.normal(0.0015), g.normal(0.0015)});
    add_polyline(s, corners, 0.02);
    finish_nodes(s);
    Scene clean;
    add_polyline(clean, {{0, 0, 0}, {1, 0, 0}}, 0.02);
    finish_nodes(clean);
    sample_edge(clean, g, 0, 2000, 0.002);
    const auto f = fit_lines(s.topo, clean.points, clean.point_edge);
    EXPECT_LE(rms(f), 0.0025) << seed;
    expect_monotone(f);

    // Unshared baseline: each segment's points fit by their own line.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t seg = 0; seg < f.skeleton.segments.size(); ++seg) {
      std::vector<Eigen::Vector3d> mine;
      for (std::size_t i = 0; i < clean.points.size(); ++i)
        if (f.point_segment[i] == static_cast<std::int32_t>(seg)) mine.push_back(clean.points[i]);
      if (mine.size() < 2) continue;
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      for (const auto& p : mine) c += p;
      c /= static_cast<double>(mine.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (const auto& p : mine) cov += (p - c) * (p - c).transpose();
      const Eigen::Vector3d u = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(cov).eigenvectors().col(2);
      for (const auto& p : mine) {
        sum += ((p - c) - u * u.dot(p - c)).squaredNorm();
        ++count;
      }
    }
    const double baseline = std::sqrt(sum / static_cast<double>(count));
    EXPECT_LE(baseline, 0.0025);
    // The shared fit pays only a little for continuity.
    EXPECT_LT(rms(f), 1.05 * baseline) << seed;
  }
}

TEST(FitLines, SharedEndpointsAtJunction) {
  Scene s;
  Gen g(3);
  add_polyline(s, {{0, 0, 0}, {0, 0, 0.4}}, 0.01);
  add_polyline(s, {{0, 0, 0.4}, {0.3, 0, 0.6}}, 0.01);
  add_polyline(s, {{0, 0, 0.4}, {-0.3, 0, 0.6}}, 0.01);
  finish_nodes(s);
  for (std::size_t e = 0; e < 3; ++e) sample_edge(s, g, e, 400, 0.002);
  const auto f = fit_lines(s.topo, s.points, s.point_edge);
  expect_monotone(f);
  // A tree skeleton has one endpoint more than segments.
  EXPECT_EQ(f.skeleton.endpoints.size(), f.skeleton.segments.size() + 1);
  std::map<std::uint32_t, std::set<std::int32_t>> edges_at;
  for (const auto& seg : f.skeleton.segments) {
    edges_at[seg.a].insert(seg.edge_id);
    edges_at[seg.b].insert(seg.edge_id);
  }
  int junctions = 0;
  for (const auto& [ep, edges] : edges_at) junctions += edges.size() == 3;
  EXPECT_EQ(junctions, 1);
}

TEST(FitLines, ClosedLoopGetsAtLeastThreeSegments) {
  Scene s;
  Gen g(4);
  add_polyline(s, {{0, 0, 0}, {0.1, 0, 0}, {0.05, 0.05, 0}, {0, 0, 0}}, 0.01);
  finish_nodes(s);
  sample_edge(s, g, 0, 300, 0.0);
  const auto f = fit_lines(s.topo, s.points, s.point_edge);
  EXPECT_GE(f.skeleton.segments.size(), 3u);
  EXPECT_EQ(f.skeleton.endpoints.size(), f.skeleton.segments.size());
  expect_monotone(f);
}

TEST(FitLines, SmallBatchesStillConverge) {
  Scene s;
  Gen g(5);
  add_polyline(s, {{0, 0, 0}, {1, 0, 0.5}, {2, 0.3, 0.5}}, 0.01);
  finish_nodes(s);
  sample_edge(s, g, 0, 3000, 0.0);
  FitParams p;
  p.batch_limit = 4;
  const auto f = fit_lines(s.topo, s.points, s.point_edge, p);
  EXPECT_LT(f.mse(), 1e-10) << f.iterations << " " << f.converged << " " << f.objective.front() << " " << f.skeleton.segments.size();
  expect_monotone(f);
}

TEST(FitLines, IgnoredPointsStayUnassigned) {
  Scene s;
  Gen g(6);
  add_polyline(s, {{0, 0, 0}, {0.5, 0, 0}}, 0.01);
  finish_nodes(s);
  sample_edge(s, g, 0, 100, 0.001);
  s.point_edge[3] = -1;
  s.point_edge[7] = 9;
  const auto f = fit_lines(s.topo, s.points, s.point_edge);
  EXPECT_EQ(f.point_segment[3], -1);
  EXPECT_EQ(f.point_segment[7], -1);
  EXPECT_GE(f.point_segment[4], 0);
}

TEST(FitLines, RandomScenesMonotone) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    Gen g(seed);
    Scene s;
    const int limbs = g.integer(1, 4);
    const Eigen::Vector3d hub(0, 0, 0.5);
    add_polyline(s, {{0, 0, 0}, hub}, 0.01);
    for (int l = 0; l < limbs; ++l) {
      const Eigen::Vector3d mid = hub + g.unit() * g.uniform(0.1, 0.4);
      add_polyline(s, {hub, mid, mid + g.unit() * g.uniform(0.1, 0.4)}, 0.01);
    }
    finish_nodes(s);
    for (std::size_t e = 0; e < s.topo.edges.size(); ++e) sample_edge(s, g, e, 300, g.uniform(0.0, 0.004));
    const auto f = fit_lines(s.topo, s.points, s.point_edge);
    expect_monotone(f);
    EXPECT_EQ(f.objective.size(), static_cast<std::size_t>(f.iterations) + 1);
  }
}

// ---- radii ----

Skeleton chain_skeleton(int segments) {
  Skeleton sk;
  for (int i = 0; i <= segments; ++i) sk.endpoints.push_back({0.1 * i, 0, 0});
  for (int i = 0; i < segments; ++i) sk.segments.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1)});
  return sk;
}

TEST(Radii, PriorOnlyGivesPrior) {
  for (int n : {1, 2, 7}) {
    const auto r = solve_radii(chain_skeleton(n), {}, {}, RadiusSystem{});
    for (double x : r) EXPECT_NEAR(x, 0.005, 1e-15);
  }
}

TEST(Radii, SinglePointClosedForm) {
  // (gamma_p * 5mm + 8mm) / (gamma_p + 1) with gamma_p = 1.
  RadiusSystem sys;
  const auto r = solve_radii(chain_skeleton(1), {0}, {0.008}, sys);
  EXPECT_NEAR(r[0], 0.0065, 1e-12);
}

TEST(Radii, NoPriorNoSmoothingGivesMean) {
  RadiusSystem sys;
  sys.gamma_p = 0.0;
  sys.gamma_s = 0.0;
  const auto r = solve_radii(chain_skeleton(3), {0, 0, 0, 1, 2, 2}, {0.003, 0.004, 0.008, 0.01, 0.002, 0.004}, sys);
  EXPECT_NEAR(r[0], 0.005, 1e-12);
  EXPECT_NEAR(r[1], 0.01, 1e-12);
  EXPECT_NEAR(r[2], 0.003, 1e-12);
}

TEST(Radii, EmptySegmentWithoutAnythingGetsPrior) {
  RadiusSystem sys;
  sys.gamma_p = 0.0;
  sys.gamma_s = 0.0;
  const auto r = solve_radii(chain_skeleton(2), {0}, {0.002}, sys);
  EXPECT_NEAR(r[1], 0.005, 1e-15);
}

TEST(Radii, ClampsBelow) {
  RadiusSystem sys;
  sys.gamma_p = 0.0;
  const auto r = solve_radii(chain_skeleton(1), {0, 0}, {0.0, 0.0001}, sys);
  EXPECT_EQ(r[0], sys.min_radius);
}

TEST(Radii, RejectsBadInput) {
  RadiusSystem sys;
  sys.gamma_p = -1.0;
  EXPECT_THROW(solve_radii(chain_skeleton(1), {}, {}, sys), InvalidParameter);
  EXPECT_THROW(solve_radii(chain_skeleton(1), {0}, {}, RadiusSystem{}), ShapeError);
  EXPECT_THROW(solve_radii(chain_skeleton(1), {3}, {0.01}, RadiusSystem{}), ShapeError);
}

TEST(Radii, ScaledWeights) {
  const auto s = RadiusSystem::scaled(1000, 10);
  EXPECT_EQ(s.gamma_p, 100.0);
  EXPECT_EQ(s.gamma_s, 10.0);
  EXPECT_EQ(RadiusSystem::scaled(0, 10).gamma_p, 1.0);
}

using testing::random_skeleton;

TEST(Radii, AdjacentPairsMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Gen g(seed);
    const auto sk = random_skeleton(g);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> want;
    for (std::uint32_t i = 0; i < sk.segments.size(); ++i)
      for (std::uint32_t j = i + 1; j < sk.segments.size(); ++j) {
        const auto &x = sk.segments[i], &y = sk.segments[j];
        if (x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b) want.push_back({i, j});
      }
    EXPECT_EQ(adjacent_segment_pairs(sk), want);
  }
}

TEST(Radii, SparseSolveMatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Gen g(seed);
    const auto sk = random_skeleton(g);
    const auto n = static_cast<Eigen::Index>(sk.segments.size());
    std::vector<std::int32_t> seg;
    std::vector<double> dist;
    const int pts = g.integer(0, 500);
    for (int i = 0; i < pts; ++i) {
      seg.push_back(g.coin(0.1) ? -1 : g.integer(0, static_cast<int>(n) - 1));
      dist.push_back(g.uniform(0.001, 0.02));
    }
    RadiusSystem sys;
    sys.gamma_p = g.uniform(0.01, 10.0);
    sys.gamma_s = g.uniform(0.0, 10.0);
    sys.min_radius = 0.0;

    const Eigen::VectorXd want = testing::dense_radii(sk, seg, dist, sys);
    const auto got = solve_radii(sk, seg, dist, sys);
    for (Eigen::Index s = 0; s < n; ++s) ASSERT_NEAR(got[static_cast<std::size_t>(s)], want(s), 1e-8) << seed;
  }
}

TEST(Radii, PermutationEquivariant) {
  Gen g(77);
  const auto sk = random_skeleton(g);
  std::vector<std::int32_t> seg;
  std::vector<double> dist;
  for (int i = 0; i < 200; ++i) {
    seg.push_back(g.integer(0, static_cast<int>(sk.segments.size()) - 1));
    dist.push_back(g.uniform(0.001, 0.02));
  }
  std::vector<std::uint32_t> perm(sk.segments.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), g.engine());
  Skeleton shuffled = sk;
  std::vector<std::int32_t> seg2(seg.size());
  for (std::size_t s = 0; s < perm.size(); ++s) shuffled.segments[perm[s]] = sk.segments[s];
  for (std::size_t i = 0; i < seg.size(); ++i) seg2[i] = static_cast<std::int32_t>(perm[static_cast<std::size_t>(seg[i])]);
  const auto r1 = solve_radii(sk, seg, dist, RadiusSystem{});
  const auto r2 = solve_radii(shuffled, seg2, dist, RadiusSystem{});
  for (std::size_t s = 0; s < perm.size(); ++s) EXPECT_NEAR(r1[s], r2[perm[s]], 1e-12);
}

TEST(Radii, EstimateWritesSegments) {
  const auto sk = estimate_radii(chain_skeleton(2), {0, 1}, {0.008, 0.008}, RadiusSystem{});
  EXPECT_GT(sk.segments[0].radius, 0.005);
  EXPECT_EQ(sk.segments[0].radius, sk.segments[1].radius);
}

}  // namespace
}  // namespace vineskel
