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

#include <cmath>

#include <fmt/format.h>

#include "agsim/error.h"
#include "agsim/planning.h"
#include "agsim/scenario.h"
#include "json_util.h"
#include "scenario_internal.h"

namespace agsim::scenario {
namespace {

using nlohmann::json;
using ::agsim::internal::Vec3Json;
using planning::Cell;
using planning::CellState;
using planning::OccupancyGrid;

constexpr double kStoppedEps = 1e-4;  // m per tick

struct GridCounts {
  int free = 0;
  int occupied = 0;
  int unknown = 0;
};

GridCounts Count(const OccupancyGrid& grid) {
  GridCounts c;
  for (const CellState s : grid.cells()) {
    if (s == CellState::kFree) ++c.free;
    if (s == CellState::kOccupied) ++c.occupied;
    if (s == CellState::kUnknown) ++c.unknown;
  }
  return c;
}

json CountsJson(const GridCounts& c) {
  return {{"free", c.free}, {"occupied", c.occupied}, {"unknown", c.unknown}};
}

Cell RequireCell(const OccupancyGrid& grid, const Vec3& p, const char* what) {
  const auto cell = grid.CellOf(p.n, p.e);
  if (!cell) {
    throw TaskFailure(fmt::format("{} ({:.2f}, {:.2f}) lies outside the planning grid", what, p.n, p.e));
  }
  return *cell;
}

// Inflated planning grid with the start cell forced passable so a vehicle
// hugging an obstacle can still plan away from it.
planning::GridPath Plan(const OccupancyGrid& raw, double inflation, const Cell& start,
                        const Cell& goal) {
  OccupancyGrid grid = planning::Inflate(raw, inflation);
  grid.Set(start, CellState::kFree);
  return planning::AStar(grid, start, goal, planning::UnknownAs::kOccupied);
}

std::string PathCsv(const OccupancyGrid& grid, const planning::GridPath& path) {
  std::string out = "index,row,col,n,e\n";
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const Vec3 c = grid.CellCenter(path.cells[i]);
    out += fmt::format("{},{},{},{:.3f},{:.3f}\n", i, path.cells[i].row, path.cells[i].col, c.n, c.e);
  }
  return out;
}

double PolylineLength(const std::vector<Vec3>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += HorizontalDistance(pts[i - 1], pts[i]);
  return total;
}

}  // namespace

RunResult RunPlanning(sim::Simulation& sim, const PlanningTask& task, const std::filesystem::path& out) {
  const world::Scene& scene = sim.scene();
  const CarParams& car = sim.params().car;
  const double dt = sim.config().dt;

  std::vector<Vec3> survey;
  for (const Vec3& p : task.survey_route) survey.push_back({p.n, p.e, -task.survey_altitude});
  detail::UavRoute uav_route(survey, task.survey_speed, /*loop=*/false);
  const auto capture_ticks =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(task.capture_period_s / dt)));

  enum class Phase { kSurvey, kDrive, kArrived };
  Phase phase = Phase::kSurvey;
  std::vector<sensors::PointCloud> clouds;
  std::optional<std::uint64_t> last_capture;
  std::optional<OccupancyGrid> raw;
  std::optional<planning::GridPath> first_path;
  std::optional<planning::GridPath> path;
  std::optional<planning::PathFollower> follower;
  Cell goal_cell;
  double drive_start = 0.0;
  double arrival = 0.0;
  double blocked_s = 0.0;
  int replans = 0;
  int blocked_events = 0;
  double last_speed_cmd = 0.0;
  std::size_t nontraversable = 0;
  std::size_t drive_samples = 0;

  detail::Stepper stepper(sim);
  detail::PositionLog log;
  auto snap = sim.Latest();
  log.Record(*snap);
  std::optional<Vec3> previous_ugv;
  while (!sim.Finished()) {
    const VehicleState& uav = detail::StateOf(*snap, task.uav_id);
    const VehicleState& ugv = detail::StateOf(*snap, task.ugv_id);
    const std::uint64_t tick = snap->time.tick;

    if (phase == Phase::kSurvey) {
      const bool at_altitude = std::abs(uav.pose.position.Altitude() - task.survey_altitude) < 2.0;
      if (at_altitude && (!last_capture || tick - *last_capture >= capture_ticks || uav_route.Done())) {
        const auto grid = sensors::CaptureDepth(scene, uav.pose, task.camera, snap->time);
        clouds.push_back(sensors::DepthToWorldCloud(grid, uav.pose));
        last_capture = tick;
      }
      if (uav_route.Done() && !clouds.empty()) {
        raw = planning::BuildOccupancy(clouds, scene, task.grid, task.height_threshold);
        clouds.clear();
        const Cell start = RequireCell(*raw, ugv.pose.position, "UGV start");
        goal_cell = RequireCell(*raw, task.goal, "goal");
        path = Plan(*raw, task.inflation, start, goal_cell);
        first_path = path;
        follower.emplace(path->waypoints, task.pursuit, car);
        phase = Phase::kDrive;
        drive_start = snap->time.seconds();
      }
    }

    if (phase == Phase::kDrive) {
      ++drive_samples;
      const Vec3& p = ugv.pose.position;
      if (!world::IsClearAt(scene, p.n, p.e, p.d, car.clearance)) ++nontraversable;
      const bool stalled = previous_ugv && HorizontalDistance(*previous_ugv, p) < kStoppedEps &&
                           std::abs(last_speed_cmd) > 0.05;
      blocked_s = stalled ? blocked_s + dt : 0.0;
      if (blocked_s > task.replan_after_s) {
        // Local avoidance: mark what is in front of the car and plan again.
        ++blocked_events;
        if (++replans > task.max_replans) {
          throw TaskFailure(fmt::format("UGV still blocked after {} replans", task.max_replans));
        }
        const double yaw = ugv.pose.Yaw();
        for (double ahead = 0.5; ahead <= car.wheelbase + 1.0; ahead += task.grid.resolution * 0.5) {
          const Vec3 q{p.n + ahead * std::cos(yaw), p.e + ahead * std::sin(yaw), 0.0};
          if (const auto cell = raw->CellOf(q.n, q.e)) raw->Set(*cell, CellState::kOccupied);
        }
        const Cell start = RequireCell(*raw, p, "UGV position");
        path = Plan(*raw, task.inflation, start, goal_cell);
        follower.emplace(path->waypoints, task.pursuit, car);
        blocked_s = 0.0;
      }
      if (follower->Finished(ugv)) {
        phase = Phase::kArrived;
        arrival = snap->time.seconds();
      }
    }
    previous_ugv = ugv.pose.position;

    // Commands for this tick.
    if (phase == Phase::kSurvey) {
      sim.Submit(task.uav_id, uav_route.Next(uav));
      sim.Submit(task.ugv_id, CarCommand::Drive(0.0, 0.0));
      last_speed_cmd = 0.0;
    } else {
      const Vec3 over{ugv.pose.position.n, ugv.pose.position.e, -task.escort_altitude};
      sim.Submit(task.uav_id, UavCommand::Waypoint(over, ugv.pose.Yaw(), sim.params().uav.max_speed));
      const CarCommand cmd =
          phase == Phase::kDrive ? follower->Step(ugv) : CarCommand::Drive(0.0, 0.0);
      last_speed_cmd = cmd.speed_cmd;
      sim.Submit(task.ugv_id, cmd);
    }
    stepper.Step();
    snap = sim.Latest();
    log.Record(*snap);
  }

  if (phase == Phase::kSurvey) throw TaskFailure("survey did not finish before the end of the run");
  if (phase != Phase::kArrived) {
    const Vec3 p = detail::StateOf(*snap, task.ugv_id).pose.position;
    throw TaskFailure(fmt::format("UGV did not reach the goal; stopped {:.2f} m away at ({:.2f}, {:.2f})",
                                  HorizontalDistance(p, task.goal), p.n, p.e));
  }

  const auto pgm = out / "occupancy.pgm";
  const auto meta = out / "occupancy.json";
  const auto path_csv = out / "path.csv";
  planning::WriteGrid(pgm, meta, *raw);
  detail::WriteText(path_csv, PathCsv(*raw, *path));

  const metrics::TrajStats drive = log.Stats(task.ugv_id, drive_start, arrival);
  RunResult result;
  result.report = {
      {"task", "planning"},
      {"ugv", metrics::ToJson(drive)},
      {"uav", metrics::ToJson(log.Stats(task.uav_id))},
      {"drive_start_s", drive_start},
      {"arrival_s", arrival},
      {"arrived", true},
      {"goal", Vec3Json(task.goal)},
      {"max_altitude_m", drive.alt_range.max},
      {"nontraversable_samples", nontraversable},
      {"drive_samples", drive_samples},
      {"replans", replans},
      {"blocked_events", blocked_events},
      {"grid",
       {{"rows", raw->rows()},
        {"cols", raw->cols()},
        {"resolution", raw->spec().resolution},
        {"cells", CountsJson(Count(*raw))},
        {"pgm", pgm.filename().string()}}},
      {"path",
       {{"cells", path->cells.size()},
        {"straight_moves", path->straight_moves},
        {"diagonal_moves", path->diagonal_moves},
        {"cost_cells", path->Cost()},
        {"length_m", PolylineLength(path->waypoints)},
        {"initial_length_m", PolylineLength(first_path->waypoints)},
        {"csv", path_csv.filename().string()}}}};
  result.artifacts = {pgm, meta, path_csv};
  return result;
}

}  // namespace agsim::scenario
