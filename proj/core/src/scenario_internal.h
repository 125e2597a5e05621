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

#ifndef AGSIM_SRC_SCENARIO_INTERNAL_H_
#define AGSIM_SRC_SCENARIO_INTERNAL_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agsim/metrics.h"
#include "agsim/scenario.h"
#include "agsim/sim.h"
#include "nlohmann/json.hpp"

namespace agsim::scenario::detail {

void WriteText(const std::filesystem::path& path, const std::string& text);
void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);

// Steps the simulation, sleeping to honor config().realtime_factor when set.
class Stepper {
 public:
  explicit Stepper(sim::Simulation& sim);
  void Step();

 private:
  sim::Simulation& sim_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t first_tick_;
};

// Per-vehicle position logs built from published snapshots.
class PositionLog {
 public:
  void Record(const sim::Snapshot& snap);
  const std::vector<metrics::StampedPosition>& Of(const std::string& id) const;
  // TrajStats over samples with seconds in [from, to].
  metrics::TrajStats Stats(const std::string& id, double from = -1.0, double to = 1e300) const;

 private:
  std::map<std::string, std::vector<metrics::StampedPosition>, std::less<>> logs_;
};

// Loops over a UAV route with waypoint commands, yawing along the leg.
class UavRoute {
 public:
  UavRoute(std::vector<Vec3> route, double speed, bool loop, double capture = 1.0);
  UavCommand Next(const VehicleState& state);
  bool Done() const { return done_; }
  std::size_t laps() const { return laps_; }

 private:
  std::vector<Vec3> route_;
  double speed_;
  bool loop_;
  double capture_;
  std::size_t index_ = 0;
  std::size_t laps_ = 0;
  bool done_ = false;
};

// Inserts points so consecutive waypoints are at most `step` apart
// horizontally; pure pursuit picks whole waypoints as lookahead targets.
std::vector<Vec3> Densify(const std::vector<Vec3>& route, double step);

const VehicleState& StateOf(const sim::Snapshot& snap, const std::string& id);

}  // namespace agsim::scenario::detail

#endif  // AGSIM_SRC_SCENARIO_INTERNAL_H_
