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

#include <vector>

#include "agsim/registration.h"
#include "agsim/rng.h"
#include "benchmark/benchmark.h"

namespace agsim {
namespace {

// Ground plane plus a few walls, enough structure to constrain all six dof.
std::vector<Vec3> Cloud(Rng& rng, int count) {
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double u = rng.Uniform(-10, 10);
    const double v = rng.Uniform(-10, 10);
    switch (i % 4) {
      case 0: pts.push_back({u, v, 0.0}); break;
      case 1: pts.push_back({4.0, u, -std::abs(v) / 2}); break;
      case 2: pts.push_back({u, -6.0, -std::abs(v) / 3}); break;
      default: pts.push_back({-3.0 + 0.1 * u, 2.0, -std::abs(v)}); break;
    }
  }
  return pts;
}

void BM_Icp(benchmark::State& state) {
  Rng rng(1);
  const std::vector<Vec3> target = Cloud(rng, static_cast<int>(state.range(0)));
  const RigidTransform offset{Quaternion::FromYawPitchRoll(0.1, 0.02, -0.03), {0.4, -0.3, 0.1}};
  std::vector<Vec3> source;
  for (const Vec3& p : target) source.push_back(ApplyTransform(offset, p));
  registration::IcpParams params;
  params.correspondence_max_dist = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(registration::Icp(source, target, RigidTransform::Identity(), params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Icp)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbor(benchmark::State& state) {
  Rng rng(2);
  const std::vector<Vec3> pts = Cloud(rng, 20000);
  const registration::NearestNeighborIndex index(pts, 1.0);
  std::vector<Vec3> queries = Cloud(rng, 1000);
  for (auto _ : state) {
    for (const Vec3& q : queries) benchmark::DoNotOptimize(index.Nearest(q));
  }
  state.SetItemsProcessed(state.iterations() * queries.size());
}
BENCHMARK(BM_NearestNeighbor);

}  // namespace
}  // namespace agsim

BENCHMARK_MAIN();
