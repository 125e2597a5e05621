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
#include <fstream>
#include <thread>

#include "agsim/error.h"
#include "agsim/metrics.h"
#include "agsim/scenario.h"
#include "json_util.h"
#include "scenario_internal.h"

namespace agsim::scenario {
namespace detail {

using nlohmann::json;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void WriteJson(const std::filesystem::path& path, const json& j) { WriteText(path, j.dump(2) + "\n"); }

Stepper::Stepper(sim::Simulation& sim)
    : sim_(sim), start_(std::chrono::steady_clock::now()), first_tick_(sim.Now().tick) {}

void Stepper::Step() {
  const double factor = sim_.config().realtime_factor;
  if (factor > 0.0) {
    const double due = static_cast<double>(sim_.Now().tick - first_tick_) * sim_.config().dt / factor;
    std::this_thread::sleep_until(start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                               std::chrono::duration<double>(due)));
  }
  sim_.Step();
}

void PositionLog::Record(const sim::Snapshot& snap) {
  for (const auto& [id, v] : snap.vehicles) {
    logs_[id].push_back({snap.time.seconds(), v.state.pose.position});
  }
}

const std::vector<metrics::StampedPosition>& PositionLog::Of(const std::string& id) const {
  static const std::vector<metrics::StampedPosition> kEmpty;
  const auto it = logs_.find(id);
  return it == logs_.end() ? kEmpty : it->second;
}

metrics::TrajStats PositionLog::Stats(const std::string& id, double from, double to) const {
  std::vector<metrics::StampedPosition> window;
  for (const auto& s : Of(id)) {
    if (s.seconds >= from && s.seconds <= to) window.push_back(s);
  }
  return metrics::ComputeTrajStats(window);
}

UavRoute::UavRoute(std::vector<Vec3> route, double speed, bool loop, double capture)
    : route_(std::move(route)), speed_(speed), loop_(loop), capture_(capture) {
  if (route_.empty()) throw ValidationError("UAV route is empty");
}

UavCommand UavRoute::Next(const VehicleState& state) {
  const Vec3& p = state.pose.position;
  if (!done_ && Distance(p, route_[index_]) <= capture_) {
    if (index_ + 1 < route_.size()) {
      ++index_;
    } else if (loop_) {
      index_ = 0;
      ++laps_;
    } else {
      done_ = true;
    }
  }
  const Vec3& goal = route_[index_];
  const Vec3 leg = goal - p;
  const double yaw = leg.HorizontalNorm() > 0.5 ? std::atan2(leg.e, leg.n) : state.pose.Yaw();
  return UavCommand::Waypoint(goal, yaw, speed_);
}

std::vector<Vec3> Densify(const std::vector<Vec3>& route, double step) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i > 0) {
      const Vec3 leg = route[i] - route[i - 1];
      const int pieces = static_cast<int>(std::ceil(leg.HorizontalNorm() / step));
      for (int k = 1; k < pieces; ++k) out.push_back(route[i - 1] + leg * (static_cast<double>(k) / pieces));
    }
    out.push_back(route[i]);
  }
  return out;
}

const VehicleState& StateOf(const sim::Snapshot& snap, const std::string& id) {
  const auto it = snap.vehicles.find(id);
  if (it == snap.vehicles.end()) throw UnknownVehicle("no vehicle '" + id + "' in snapshot");
  return it->second.state;
}

}  // namespace detail

namespace {

using nlohmann::json;

RunResult RunNone(sim::Simulation& sim) {
  detail::Stepper stepper(sim);
  detail::PositionLog log;
  log.Record(*sim.Latest());
  while (!sim.Finished()) {
    stepper.Step();
    log.Record(*sim.Latest());
  }
  RunResult result;
  json vehicles = json::object();
  for (const auto& info : sim.ListVehicles()) {
    vehicles[info.id] = metrics::ToJson(log.Stats(info.id));
  }
  result.report = {{"task", "none"},
                   {"ticks", sim.Now().tick},
                   {"duration_s", sim.Now().seconds()},
                   {"vehicles", std::move(vehicles)}};
  return result;
}

std::string RenderRunReport(const json& report) {
  std::vector<metrics::TableRow> rows;
  for (const auto& [id, stats] : report.at("vehicles").items()) {
    rows.push_back({id, "Duration (s)", metrics::Fixed1(stats.at("duration_s").get<double>())});
    rows.push_back({"", "Total Length (m)", metrics::Fixed1(stats.at("total_length_m").get<double>())});
    rows.push_back(
        {"", "Average Speed (m/s)", metrics::Fixed1(stats.at("average_speed_mps").get<double>())});
  }
  return metrics::RenderTable("Run", rows);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw MissingArtifact("report '" + path.string() + "' is not valid JSON");
  return j;
}

}  // namespace

RunResult RunScenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto sim = BuildSimulation(config, LoadScenarioScene(config));
  RunResult result;
  try {
    switch (config.task) {
      case TaskKind::kNone:
        result = RunNone(*sim);
        break;
      case TaskKind::kMapping:
        result = RunMapping(*sim, config.mapping, out_dir);
        break;
      case TaskKind::kPlanning:
        result = RunPlanning(*sim, config.planning, out_dir);
        break;
      case TaskKind::kTracking:
        result = RunTracking(*sim, config.tracking, out_dir);
        break;
      case TaskKind::kFormation:
        result = RunFormation(*sim, config.formation, out_dir);
        break;
    }
  } catch (const TaskFailure&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw TaskFailure(std::string(TaskKindName(config.task)) + " task failed: " + e.what());
  }
  result.report["seed"] = config.sim.seed;
  const auto trajectory = out_dir / kTrajectoryFile;
  sim->WriteTrajectory(trajectory);
  result.artifacts.push_back(trajectory);
  const auto report = out_dir / ReportFileName(config.task);
  detail::WriteJson(report, result.report);
  result.artifacts.push_back(report);
  return result;
}

std::string RenderReports(const std::filesystem::path& dir) {
  const TaskKind kinds[] = {TaskKind::kMapping, TaskKind::kPlanning, TaskKind::kTracking,
                            TaskKind::kFormation, TaskKind::kNone};
  std::string out;
  std::string expected;
  for (const TaskKind kind : kinds) {
    const auto path = dir / ReportFileName(kind);
    expected += (expected.empty() ? "" : ", ") + ReportFileName(kind);
    if (!std::filesystem::is_regular_file(path)) continue;
    const json report = ReadJsonFile(path);
    try {
      switch (kind) {
        case TaskKind::kMapping:
          out += metrics::RenderMappingReport(report);
          break;
        case TaskKind::kPlanning:
          out += metrics::RenderPlanningReport(report);
          break;
        case TaskKind::kTracking:
          out += metrics::RenderTrackingReport(report);
          break;
        case TaskKind::kFormation:
          out += metrics::RenderFormationReport(report);
          break;
        case TaskKind::kNone:
          out += RenderRunReport(report);
          break;
      }
    } catch (const json::exception& e) {
      throw MissingArtifact("report '" + path.string() + "' is incomplete: " + e.what());
    }
    out += "\n";
  }
  if (out.empty()) {
    throw MissingArtifact("no report in '" + dir.string() + "'; expected one of: " + expected);
  }
  return out;
}

}  // namespace agsim::scenario
