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

#ifndef AGSIM_SCENARIO_H_
#define AGSIM_SCENARIO_H_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/planning.h"
#include "agsim/registration.h"
#include "agsim/sensors.h"
#include "agsim/sim.h"
#include "agsim/tracking.h"
#include "agsim/vehicles.h"
#include "agsim/world.h"
#include "nlohmann/json.hpp"

namespace agsim::scenario {

struct VehicleSpec {
  std::string id;
  VehicleType type = VehicleType::kMultirotor;
  NedPose initial;
  sim::SensorSuiteConfig sensors;
};

enum class TaskKind { kNone, kMapping, kPlanning, kTracking, kFormation };

std::string_view TaskKindName(TaskKind kind);

// Both agents scan the scene; the UAV map is registered onto the UGV map.
struct MappingTask {
  std::string uav_id;
  std::string ugv_id;
  std::vector<Vec3> uav_route;  // flown in order, looping
  double uav_speed = 2.5;
  std::vector<Vec3> ugv_route;  // driven once with pure pursuit
  double ugv_speed = 2.3;
  double voxel = 0.25;
  // Applied to the UAV map about the UAV start position before registration;
  // ICP should recover its inverse.
  RigidTransform uav_map_offset;
  registration::IcpParams icp;
};

// The UAV surveys with a nadir depth camera, the grid is planned on with A*,
// and the UGV drives the path while the UAV escorts it.
struct PlanningTask {
  std::string uav_id;
  std::string ugv_id;
  std::vector<Vec3> survey_route;  // (n, e) waypoints; d is set from altitude
  double survey_altitude = 85.0;
  double survey_speed = 8.0;
  double capture_period_s = 2.0;
  sensors::DepthConfig camera;
  planning::GridSpec grid;
  double height_threshold = 0.4;
  double inflation = 1.5;
  Vec3 goal;
  planning::PurePursuitParams pursuit;
  double replan_after_s = 1.0;
  int max_replans = 20;
  double escort_altitude = 20.0;
};

struct TrackingTask {
  std::string uav_id;
  std::string ugv_id;
  tracking::TargetScript target;
  tracking::StandoffParams uav{14.0, 0.8, 10.0};
  tracking::StandoffParams ugv{6.0, 0.8, std::nullopt};
  double target_height = 0.5;       // observed point above the target origin
  double ugv_sensor_height = 1.5;   // camera above the UGV origin
  double yaw_settle_s = 50.0;
  double steady_fraction = 0.25;    // trailing share of the run used as steady state
};

struct FormationTask {
  tracking::FormationSpec spec;
  std::vector<std::string> ugv_ids;
  std::vector<std::string> uav_ids;
};

struct ScenarioConfig {
  std::filesystem::path scene_path;
  sim::SimConfig sim;
  VehicleParams vehicle_params;
  std::vector<VehicleSpec> vehicles;
  TaskKind task = TaskKind::kNone;
  MappingTask mapping;
  PlanningTask planning;
  TrackingTask tracking;
  FormationTask formation;
  std::filesystem::path outputs;  // empty unless configured
};

// Strict parser: unknown fields are rejected and every error names the
// offending field. Relative paths resolve against `base_dir`.
// Throws ConfigError.
ScenarioConfig ParseScenario(std::string_view json_text, const std::filesystem::path& base_dir);
ScenarioConfig LoadScenario(const std::filesystem::path& path);

// Loads the scene (ConfigError on failure) and registers every vehicle.
std::unique_ptr<sim::Simulation> BuildSimulation(const ScenarioConfig& config,
                                                 std::shared_ptr<const world::Scene> scene);
std::shared_ptr<const world::Scene> LoadScenarioScene(const ScenarioConfig& config);

inline constexpr const char* kTrajectoryFile = "trajectory.csv";
// Report file written by each task kind.
std::string ReportFileName(TaskKind kind);

struct RunResult {
  nlohmann::json report;
  std::vector<std::filesystem::path> artifacts;
};

// Runs the configured task to completion, writing artifacts under out_dir.
// Throws TaskFailure when the task cannot complete.
RunResult RunScenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

// Task runners over an already-built simulation.
RunResult RunMapping(sim::Simulation& sim, const MappingTask& task, const std::filesystem::path& out);
RunResult RunPlanning(sim::Simulation& sim, const PlanningTask& task,
                      const std::filesystem::path& out);
RunResult RunTracking(sim::Simulation& sim, const TrackingTask& task,
                      const std::filesystem::path& out);
RunResult RunFormation(sim::Simulation& sim, const FormationTask& task,
                       const std::filesystem::path& out);

// Renders every report found in an artifacts directory. Throws
// MissingArtifact listing the expected files when none is present.
std::string RenderReports(const std::filesystem::path& dir);

}  // namespace agsim::scenario

#endif  // AGSIM_SCENARIO_H_
