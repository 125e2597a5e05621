/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "agsim/error.h"
#include "agsim/planning.h"
#include "agsim/rng.h"
#include "benchmark/benchmark.h"

namespace agsim::planning {
namespace {

void BM_AStar(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GridSpec spec;
  spec.resolution = 1.0;
  spec.rows = n;
  spec.cols = n;
  OccupancyGrid grid(spec, CellState::kFree);
  Rng rng(3);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (rng.Uniform() < 0.2) grid.Set({r, c}, CellState::kOccupied);
    }
  }
  const Cell start{0, 0};
  const Cell goal{n - 1, n - 1};
  grid.Set(start, CellState::kFree);
  grid.Set(goal, CellState::kFree);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(AStar(grid, start, goal));
    } catch (const ::agsim::NoPath&) {
      state.SkipWithError("no path");
      break;
    }
  }
}
BENCHMARK(BM_AStar)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace agsim::planning

BENCHMARK_MAIN();
