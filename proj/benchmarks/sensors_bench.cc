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

#include "agsim/rng.h"
#include "agsim/sensors.h"
#include "agsim/world.h"
#include "benchmark/benchmark.h"

#ifndef AGSIM_DATA_DIR
#error "AGSIM_DATA_DIR must be defined"
#endif

namespace agsim::sensors {
namespace {

const world::Scene& BridgeTown() {
  static const world::Scene scene = world::LoadScene(std::string(AGSIM_DATA_DIR) + "/scenes/bridge_town.json");
  return scene;
}

void BM_LidarScan(benchmark::State& state) {
  LidarConfig cfg;
  cfg.channels = 16;
  cfg.points_per_channel = 360;
  cfg.noise_sigma = 0.02;
  const NedPose pose{{50.0, 50.0, -1.5}, Quaternion::FromYawPitchRoll(0.3, 0.0, 0.0)};
  Rng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(LidarScan(BridgeTown(), pose, cfg, &rng));
  }
  state.SetItemsProcessed(state.iterations() * cfg.channels * cfg.points_per_channel);
}
BENCHMARK(BM_LidarScan)->Unit(benchmark::kMillisecond);

void BM_DepthCapture(benchmark::State& state) {
  DepthConfig cfg;
  cfg.mount.rotation = Quaternion::FromYawPitchRoll(0.0, -kPi / 2, 0.0);
  const NedPose pose{{60.0, 60.0, -85.0}, Quaternion::Identity()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(CaptureDepth(BridgeTown(), pose, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.width * cfg.height);
}
BENCHMARK(BM_DepthCapture)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace agsim::sensors

BENCHMARK_MAIN();
