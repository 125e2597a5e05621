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

#ifndef AGSIM_VEHICLES_H_
#define AGSIM_VEHICLES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "agsim/geometry.h"
#include "agsim/world.h"

namespace agsim {

// Unified simulation clock value. Seconds are always derived from the tick.
struct SimTime {
  std::uint64_t tick = 0;
  double dt = 0.02;

  double seconds() const { return static_cast<double>(tick) * dt; }
  bool operator==(const SimTime& o) const { return tick == o.tick && dt == o.dt; }
};

enum class VehicleType { kMultirotor, kCar };

std::string_view VehicleTypeName(VehicleType type);
std::optional<VehicleType> ParseVehicleType(std::string_view name);

struct VehicleState {
  std::string id;
  VehicleType vtype = VehicleType::kMultirotor;
  NedPose pose;
  Vec3 velocity;  // NED, m/s
  double yaw_rate = 0.0;
  SimTime stamp;
};

struct UavCommand {
  enum class Mode { kVelocity, kWaypoint };
  Mode mode = Mode::kVelocity;
  Vec3 velocity_cmd;
  Vec3 waypoint;
  double yaw_cmd = 0.0;
  double speed_limit = 5.0;

  static UavCommand Velocity(const Vec3& v, double yaw, double speed_limit = 5.0) {
    return {Mode::kVelocity, v, {}, yaw, speed_limit};
  }
  static UavCommand Waypoint(const Vec3& target, double yaw, double speed_limit) {
    return {Mode::kWaypoint, {}, target, yaw, speed_limit};
  }
};

struct CarCommand {
  enum class Mode { kDrive, kWaypoint };
  Mode mode = Mode::kDrive;
  double speed_cmd = 0.0;
  double steer_cmd = 0.0;
  Vec3 waypoint;

  static CarCommand Drive(double speed, double steer) { return {Mode::kDrive, speed, steer, {}}; }
  static CarCommand Waypoint(const Vec3& target, double speed) {
    return {Mode::kWaypoint, speed, 0.0, target};
  }
};

using VehicleCommand = std::variant<UavCommand, CarCommand>;

struct CarParams {
  double wheelbase = 2.5;
  double max_speed = 5.0;
  double max_steer = 0.6;
  double max_step = 0.35;   // tallest ledge the car can climb (m)
  double clearance = 2.0;   // vehicle height used for blocking (m)
};

struct UavParams {
  double tau = 0.5;  // velocity time constant (s)
  double max_speed = 6.0;
  double max_climb = 3.0;
  double capture_radius = 0.2;
};

struct VehicleParams {
  CarParams car;
  UavParams uav;
};

// Throws ValidationError if any parameter is non-positive.
void ValidateParams(const VehicleParams& params);
// Throws ValidationError on non-finite fields or a non-positive speed limit.
void ValidateCommand(const UavCommand& cmd);
// Throws ValidationError if the steering command exceeds max_steer.
void ValidateCommand(const CarCommand& cmd, const CarParams& params);

// Velocity the UAV model is trying to reach for the given command.
Vec3 UavDesiredVelocity(const VehicleState& state, const UavCommand& cmd, const UavParams& params);

// First-order velocity lag, explicit Euler position update. `ground_d` keeps
// the multirotor at or above the ground plane. Throws TypeMismatch.
VehicleState StepUav(const VehicleState& state, const UavCommand& cmd, const VehicleParams& params,
                     double dt, double ground_d = 0.0);

// Kinematic bicycle with explicit Euler; d follows the local support surface
// and the car is held in place when the next position is blocked. Only drive
// mode is stepped here; waypoint mode is resolved to drive by the caller.
// Throws TypeMismatch.
VehicleState StepCar(const VehicleState& state, const CarCommand& cmd, const VehicleParams& params,
                     const world::Scene& scene, double dt);

// Pure-pursuit steering toward a point: delta = atan(2 wb sin(alpha) / L),
// where alpha is the bearing to the point in the body frame and L its
// horizontal distance. Clamped to max_steer; 0 when L is 0.
double PursuitSteer(const NedPose& pose, const Vec3& point, const CarParams& car);

struct CarStep {
  VehicleState state;
  bool blocked = false;
};
// StepCar that also reports whether the move was blocked.
CarStep StepCarChecked(const VehicleState& state, const CarCommand& cmd,
                       const VehicleParams& params, const world::Scene& scene, double dt);

}  // namespace agsim

#endif  // AGSIM_VEHICLES_H_
