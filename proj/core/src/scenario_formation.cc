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

#include <chrono>
#include <cmath>
#include <set>

#include "agsim/error.h"
#include "agsim/scenario.h"
#include "agsim/tracking.h"
#include "scenario_internal.h"

namespace agsim::scenario {
namespace {

using nlohmann::json;

// Every stamp carried by the snapshot: vehicle states plus frames produced on
// this tick.
std::set<std::uint64_t> Stamps(const sim::Snapshot& snap) {
  std::set<std::uint64_t> ticks;
  for (const auto& [id, v] : snap.vehicles) {
    ticks.insert(v.state.stamp.tick);
    if (v.lidar_fresh && v.lidar) ticks.insert(v.lidar->cloud.stamp.tick);
    if (v.depth_fresh && v.depth) ticks.insert(v.depth->stamp.tick);
  }
  return ticks;
}

}  // namespace

RunResult RunFormation(sim::Simulation& sim, const FormationTask& task, const std::filesystem::path&) {
  tracking::Validate(task.spec);
  const double dt = sim.config().dt;
  const int n = static_cast<int>(task.ugv_ids.size());
  const int m = static_cast<int>(task.uav_ids.size());

  int violations = 0;
  std::uint64_t depth_frames = 0;
  std::uint64_t lidar_frames = 0;
  std::uint64_t snapshots = 0;
  double sum_radius_err = 0.0;
  double max_radius_err = 0.0;
  double sum_uav_ref_err = 0.0;
  double max_separation_dev = 0.0;
  std::uint64_t ugv_samples = 0;
  std::uint64_t uav_samples = 0;

  detail::Stepper stepper(sim);
  auto snap = sim.Latest();
  const auto wall_start = std::chrono::steady_clock::now();
  while (true) {
    ++snapshots;
    const std::set<std::uint64_t> stamps = Stamps(*snap);
    if (stamps.size() != 1 || *stamps.begin() != snap->time.tick) ++violations;
    for (const auto& [id, v] : snap->vehicles) {
      if (v.depth_fresh) ++depth_frames;
      if (v.lidar_fresh) ++lidar_frames;
    }
    const double t = snap->time.seconds();
    for (int k = 0; k < n; ++k) {
      const Vec3 p = detail::StateOf(*snap, task.ugv_ids[k]).pose.position;
      const double err = std::abs(HorizontalDistance(p, task.spec.ugv.center) - task.spec.ugv.radius);
      sum_radius_err += err;
      max_radius_err = std::max(max_radius_err, err);
      ++ugv_samples;
      // Reference spacing between consecutive UGVs.
      const Vec3 a = tracking::UgvReference(task.spec, k, t).position - task.spec.ugv.center;
      const Vec3 b = tracking::UgvReference(task.spec, (k + 1) % n, t).position - task.spec.ugv.center;
      const double sep = WrapAngle(std::atan2(b.e, b.n) - std::atan2(a.e, a.n));
      const double expected = n > 1 ? WrapAngle(2.0 * kPi / n) : 0.0;
      max_separation_dev = std::max(max_separation_dev, std::abs(WrapAngle(sep - expected)));
    }
    for (int k = 0; k < m; ++k) {
      const Vec3 p = detail::StateOf(*snap, task.uav_ids[k]).pose.position;
      sum_uav_ref_err += Distance(p, tracking::UavReference(task.spec, k, t).position);
      ++uav_samples;
    }
    if (sim.Finished()) break;
    for (int k = 0; k < n; ++k) {
      sim.Submit(task.ugv_ids[k],
                 tracking::FormationCommandCar(task.spec, k, detail::StateOf(*snap, task.ugv_ids[k]), t,
                                               sim.params().car));
    }
    for (int k = 0; k < m; ++k) {
      sim.Submit(task.uav_ids[k],
                 tracking::FormationCommandUav(task.spec, k, detail::StateOf(*snap, task.uav_ids[k]), t,
                                               sim.params().uav));
    }
    stepper.Step();
    snap = sim.Latest();
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();

  int depth_vehicles = 0;
  int lidar_vehicles = 0;
  for (const auto& info : sim.ListVehicles()) {
    depth_vehicles += info.has_depth ? 1 : 0;
    lidar_vehicles += info.has_lidar ? 1 : 0;
  }
  const double sim_seconds = sim.Now().seconds();
  const auto rate = [&](std::uint64_t frames, int vehicles) {
    return vehicles > 0 && sim_seconds > 0.0 ? static_cast<double>(frames) / vehicles / sim_seconds : 0.0;
  };
  const auto ticks = sim.Now().tick;

  RunResult result;
  result.report = {
      {"task", "formation"},
      {"vehicle_count", static_cast<int>(sim.ListVehicles().size())},
      {"ugv_count", n},
      {"uav_count", m},
      {"ticks", ticks},
      {"snapshots_checked", snapshots},
      {"dt_s", dt},
      {"odometry_rate_hz", 1.0 / dt},
      {"image_rate_hz", rate(depth_frames, depth_vehicles)},
      {"lidar_rate_hz", rate(lidar_frames, lidar_vehicles)},
      {"sync_violations", violations},
      {"wall_ms_per_tick", ticks > 0 ? wall_ms / static_cast<double>(ticks) : 0.0},
      {"ugv_mean_radius_err_m", ugv_samples ? sum_radius_err / ugv_samples : 0.0},
      {"ugv_max_radius_err_m", max_radius_err},
      {"uav_mean_reference_err_m", uav_samples ? sum_uav_ref_err / uav_samples : 0.0},
      {"ugv_reference_separation_max_dev_rad", max_separation_dev}};
  return result;
}

}  // namespace agsim::scenario
