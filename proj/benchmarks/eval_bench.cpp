// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "generators.hpp"
#include "vineskel/eval.hpp"
#include "vineskel/mask.hpp"
#include "vineskel/synth.hpp"

#include <benchmark/benchmark.h>

namespace vineskel {
namespace {

void BM_ProjectSkeleton(benchmark::State& state) {
  VineSpec spec;
  spec.seed = 6;
  const auto vine = generate_vine(spec);
  const auto sk = truth_skeleton(vine.truth);
  for (auto _ : state) benchmark::DoNotOptimize(project_skeleton(sk, vine.cameras[0]));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sk.segments.size()));
}
BENCHMARK(BM_ProjectSkeleton)->Unit(benchmark::kMicrosecond);

void BM_ReprojectionIou(benchmark::State& state) {
  VineSpec spec;
  spec.seed = 7;
  const auto vine = generate_vine(spec);
  const auto sk = truth_skeleton(vine.truth);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reprojection_iou(sk, vine.cameras, vine.masks, threads));
}
BENCHMARK(BM_ReprojectionIou)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_RefineMask(benchmark::State& state) {
  testing::Gen g(8);
  const auto m = g.blob_mask(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 12);
  for (auto _ : state) benchmark::DoNotOptimize(refine_cane_mask(m, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RefineMask)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace vineskel

BENCHMARK_MAIN();
