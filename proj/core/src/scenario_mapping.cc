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

#include <algorithm>
#include <cmath>

#include "agsim/error.h"
#include "agsim/planning.h"
#include "agsim/registration.h"
#include "agsim/scenario.h"
#include "json_util.h"
#include "scenario_internal.h"

namespace agsim::scenario {
namespace {

using nlohmann::json;
using ::agsim::internal::Vec3Json;

constexpr double kGroundBand = 0.5;  // m above the ground plane

json YprDegJson(const Quaternion& q) {
  return json::array({RadToDeg(q.Yaw()), RadToDeg(q.Pitch()), RadToDeg(q.Roll())});
}

sensors::PointCloud MakeCloud(std::string frame_id, SimTime stamp, std::vector<Vec3> points) {
  sensors::PointCloud cloud;
  cloud.frame_id = std::move(frame_id);
  cloud.stamp = stamp;
  cloud.points = std::move(points);
  return cloud;
}

// Registration input: ground returns thinned to `ground_voxel` so the plane
// does not outweigh the structure that pins the horizontal alignment.
std::vector<Vec3> ThinGround(std::span<const Vec3> points, double ground_d, double voxel,
                             double ground_voxel) {
  std::vector<Vec3> ground;
  std::vector<Vec3> structure;
  for (const Vec3& p : points) (ground_d - p.d < kGroundBand ? ground : structure).push_back(p);
  std::vector<Vec3> out = registration::VoxelDownsample(structure, voxel);
  const std::vector<Vec3> thinned = registration::VoxelDownsample(ground, ground_voxel);
  out.insert(out.end(), thinned.begin(), thinned.end());
  return out;
}

}  // namespace

RunResult RunMapping(sim::Simulation& sim, const MappingTask& task, const std::filesystem::path& out) {
  const CarParams& car = sim.params().car;
  detail::UavRoute uav_route(task.uav_route, task.uav_speed, /*loop=*/true);
  planning::PurePursuitParams pursuit;
  pursuit.cruise_speed = task.ugv_speed;
  planning::PathFollower ugv_route(detail::Densify(task.ugv_route, 0.5), pursuit, car);

  std::vector<Vec3> uav_points;
  std::vector<Vec3> ugv_points;
  std::uint64_t uav_frames = 0;
  std::uint64_t ugv_frames = 0;
  auto collect = [&](const sim::Snapshot& snap, bool force) {
    for (const auto& [id, v] : snap.vehicles) {
      if (!v.lidar || !(v.lidar_fresh || force)) continue;
      const auto world = sensors::CloudToWorld(v.lidar->cloud, v.lidar->sensor_pose);
      if (id == task.uav_id) {
        uav_points.insert(uav_points.end(), world.points.begin(), world.points.end());
        ++uav_frames;
      } else if (id == task.ugv_id) {
        ugv_points.insert(ugv_points.end(), world.points.begin(), world.points.end());
        ++ugv_frames;
      }
    }
  };

  detail::Stepper stepper(sim);
  detail::PositionLog log;
  auto snap = sim.Latest();
  // The map offset acts about the UAV start position, like drift in its own
  // odometry frame.
  const Vec3 origin = detail::StateOf(*snap, task.uav_id).pose.position;
  RigidTransform offset = task.uav_map_offset;
  offset.translation = origin + task.uav_map_offset.translation -
                       task.uav_map_offset.rotation.Rotate(origin);
  log.Record(*snap);
  collect(*snap, /*force=*/true);
  while (!sim.Finished()) {
    sim.Submit(task.uav_id, uav_route.Next(detail::StateOf(*snap, task.uav_id)));
    const VehicleState& ugv = detail::StateOf(*snap, task.ugv_id);
    sim.Submit(task.ugv_id, ugv_route.Finished(ugv) ? CarCommand::Drive(0.0, 0.0) : ugv_route.Step(ugv));
    stepper.Step();
    snap = sim.Latest();
    log.Record(*snap);
    collect(*snap, /*force=*/false);
  }

  // The UAV map is handed over in its own (offset) frame; ICP estimates the
  // transform back onto the UGV map.
  std::vector<Vec3> uav_map = registration::VoxelDownsample(uav_points, task.voxel);
  for (Vec3& p : uav_map) p = ApplyTransform(offset, p);
  const std::vector<Vec3> ugv_map = registration::VoxelDownsample(ugv_points, task.voxel);
  if (uav_map.empty() || ugv_map.empty()) {
    throw TaskFailure("mapping produced an empty map (uav " + std::to_string(uav_map.size()) +
                      " points, ugv " + std::to_string(ugv_map.size()) + " points)");
  }
  // Coarse to fine: thinned maps at the full correspondence distance, then
  // the distance halved twice.
  const double ground_d = sim.scene().ground_d();
  const double coarse_voxel = std::max(1.0, 4.0 * task.voxel);
  const std::vector<Vec3> uav_reg = ThinGround(uav_map, ground_d, task.voxel, coarse_voxel);
  const std::vector<Vec3> ugv_reg = ThinGround(ugv_map, ground_d, task.voxel, coarse_voxel);
  registration::IcpParams params = task.icp;
  registration::IcpResult icp;
  json stages = json::array();
  for (int stage = 0; stage < 3; ++stage) {
    icp = registration::Icp(uav_reg, ugv_reg, icp.transform, params);
    stages.push_back({{"max_dist_m", params.correspondence_max_dist},
                      {"rmse_m", icp.rmse},
                      {"iterations", icp.iterations}});
    if (stage < 2) params.correspondence_max_dist /= 2.0;
  }

  // Residual of the recovered transform against the applied offset.
  const RigidTransform residual = Compose(icp.transform, offset);
  const RigidTransform truth = offset.Inverse();

  const SimTime now = sim.Now();
  std::vector<Vec3> registered;
  registered.reserve(uav_map.size());
  for (const Vec3& p : uav_map) registered.push_back(ApplyTransform(icp.transform, p));
  const auto uav_base = out / "uav_cloud";
  const auto ugv_base = out / "ugv_cloud";
  const auto reg_base = out / "uav_cloud_registered";
  sensors::WriteCloud(uav_base, MakeCloud("uav_map", now, uav_map));
  sensors::WriteCloud(ugv_base, MakeCloud("world", now, ugv_map));
  sensors::WriteCloud(reg_base, MakeCloud("world", now, registered));

  json history = json::array();
  for (const double r : icp.rmse_history) history.push_back(r);

  RunResult result;
  result.report = {
      {"task", "mapping"},
      {"ugv", metrics::ToJson(log.Stats(task.ugv_id))},
      {"uav", metrics::ToJson(log.Stats(task.uav_id))},
      {"registration",
       {{"source", "uav"},
        {"target", "ugv"},
        {"est_translation", Vec3Json(icp.transform.translation)},
        {"est_rotation_ypr_deg", YprDegJson(icp.transform.rotation)},
        {"true_translation", Vec3Json(truth.translation)},
        {"true_rotation_ypr_deg", YprDegJson(truth.rotation)},
        {"translation_err_m", residual.translation.Norm()},
        {"rotation_err_deg", RadToDeg(residual.rotation.Angle())},
        {"rmse_m", icp.rmse},
        {"rmse_at_truth_m", registration::CloudRmse(uav_reg, ugv_reg, truth, params.correspondence_max_dist)},
        {"registration_points", json::array({uav_reg.size(), ugv_reg.size()})},
        {"rmse_history", std::move(history)},
        {"stages", std::move(stages)},
        {"iterations", icp.iterations},
        {"pairs_used", icp.pairs_used},
        {"converged", icp.converged},
        {"uav_points", uav_map.size()},
        {"ugv_points", ugv_map.size()},
        {"uav_frames", uav_frames},
        {"ugv_frames", ugv_frames},
        {"voxel_m", task.voxel}}},
      {"ugv_route_completed", ugv_route.Finished(detail::StateOf(*snap, task.ugv_id))}};
  for (const auto& base : {uav_base, ugv_base, reg_base}) {
    result.artifacts.push_back(base.string() + ".xyz");
    result.artifacts.push_back(base.string() + ".json");
  }
  return result;
}

}  // namespace agsim::scenario
