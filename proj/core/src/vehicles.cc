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

#include "agsim/vehicles.h"

#include <algorithm>
#include <cmath>

#include "agsim/error.h"

namespace agsim {
namespace {

Vec3 ClipUavVelocity(Vec3 v, const UavParams& params) {
  v.d = std::clamp(v.d, -params.max_climb, params.max_climb);
  const double speed = v.Norm();
  if (speed > params.max_speed) v = v * (params.max_speed / speed);
  return v;
}

}  // namespace

std::string_view VehicleTypeName(VehicleType type) {
  return type == VehicleType::kMultirotor ? "multirotor" : "car";
}

std::optional<VehicleType> ParseVehicleType(std::string_view name) {
  if (name == "multirotor") return VehicleType::kMultirotor;
  if (name == "car") return VehicleType::kCar;
  return std::nullopt;
}

void ValidateParams(const VehicleParams& params) {
  const auto& c = params.car;
  const auto& u = params.uav;
  for (const double value : {c.wheelbase, c.max_speed, c.max_steer, c.max_step, c.clearance, u.tau,
                             u.max_speed, u.max_climb, u.capture_radius}) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ValidationError("vehicle parameters must all be positive and finite");
    }
  }
}

void ValidateCommand(const UavCommand& cmd) {
  if (!cmd.velocity_cmd.IsFinite() || !cmd.waypoint.IsFinite() || !std::isfinite(cmd.yaw_cmd)) {
    throw ValidationError("multirotor command has non-finite fields");
  }
  if (!(cmd.speed_limit > 0.0) || !std::isfinite(cmd.speed_limit)) {
    throw ValidationError("multirotor command speed_limit must be > 0");
  }
}

void ValidateCommand(const CarCommand& cmd, const CarParams& params) {
  if (!std::isfinite(cmd.speed_cmd) || !std::isfinite(cmd.steer_cmd) || !cmd.waypoint.IsFinite()) {
    throw ValidationError("car command has non-finite fields");
  }
  if (std::abs(cmd.steer_cmd) > params.max_steer) {
    throw ValidationError("car steer_cmd exceeds max_steer");
  }
}

Vec3 UavDesiredVelocity(const VehicleState& state, const UavCommand& cmd, const UavParams& params) {
  if (cmd.mode == UavCommand::Mode::kVelocity) return cmd.velocity_cmd;
  const Vec3 delta = cmd.waypoint - state.pose.position;
  const double dist = delta.Norm();
  if (dist <= params.capture_radius) return {};
  // Approach gain 1/(4 tau) makes the lagged closed loop critically damped.
  const double speed = std::min({cmd.speed_limit, params.max_speed, dist / (4.0 * params.tau)});
  return delta * (speed / dist);
}

VehicleState StepUav(const VehicleState& state, const UavCommand& cmd, const VehicleParams& params,
                     double dt, double ground_d) {
  if (state.vtype != VehicleType::kMultirotor) {
    throw TypeMismatch("StepUav called for non-multirotor vehicle '" + state.id + "'");
  }
  const UavParams& p = params.uav;
  const double alpha = std::min(1.0, dt / p.tau);
  const Vec3 v_des = UavDesiredVelocity(state, cmd, p);

  VehicleState next = state;
  next.velocity = ClipUavVelocity(state.velocity + (v_des - state.velocity) * alpha, p);
  next.pose.position = state.pose.position + next.velocity * dt;
  if (next.pose.position.d > ground_d) {
    next.pose.position.d = ground_d;
    next.velocity.d = std::min(next.velocity.d, 0.0);
  }
  const double yaw = state.pose.Yaw();
  const double yaw_step = alpha * WrapAngle(cmd.yaw_cmd - yaw);
  next.pose.orientation =
      yaw_step == 0.0 ? state.pose.orientation : Quaternion::FromYaw(WrapAngle(yaw + yaw_step));
  next.yaw_rate = yaw_step / dt;
  next.stamp = {state.stamp.tick + 1, dt};
  return next;
}

CarStep StepCarChecked(const VehicleState& state, const CarCommand& cmd,
                       const VehicleParams& params, const world::Scene& scene, double dt) {
  if (state.vtype != VehicleType::kCar) {
    throw TypeMismatch("StepCar called for non-car vehicle '" + state.id + "'");
  }
  const CarParams& p = params.car;
  const double speed = std::clamp(cmd.speed_cmd, -p.max_speed, p.max_speed);
  const double steer = std::clamp(cmd.steer_cmd, -p.max_steer, p.max_steer);
  const double yaw = state.pose.Yaw();

  CarStep result{state, false};
  VehicleState& next = result.state;
  next.stamp = {state.stamp.tick + 1, dt};

  const Vec3& pos = state.pose.position;
  const double n = pos.n + speed * std::cos(yaw) * dt;
  const double e = pos.e + speed * std::sin(yaw) * dt;
  bool blocked = !scene.ContainsHorizontal(n, e);
  double support = pos.d;
  if (!blocked) {
    support = world::SupportSurfaceD(scene, n, e, pos.d, p.max_step);
    blocked = !world::IsClearAt(scene, n, e, support, p.clearance);
  }
  if (blocked) {
    next.velocity = {};
    next.yaw_rate = 0.0;
    result.blocked = true;
    return result;
  }
  const double yaw_rate = speed * std::tan(steer) / p.wheelbase;
  next.pose.position = {n, e, support};
  next.pose.orientation =
      yaw_rate == 0.0 ? state.pose.orientation : Quaternion::FromYaw(WrapAngle(yaw + yaw_rate * dt));
  next.velocity = {speed * std::cos(yaw), speed * std::sin(yaw), 0.0};
  next.yaw_rate = yaw_rate;
  return result;
}

double PursuitSteer(const NedPose& pose, const Vec3& point, const CarParams& car) {
  const double dn = point.n - pose.position.n, de = point.e - pose.position.e;
  const double dist = std::hypot(dn, de);
  if (dist == 0.0) return 0.0;
  const double alpha = WrapAngle(std::atan2(de, dn) - pose.Yaw());
  const double steer = std::atan(2.0 * car.wheelbase * std::sin(alpha) / dist);
  return std::clamp(steer, -car.max_steer, car.max_steer);
}

VehicleState StepCar(const VehicleState& state, const CarCommand& cmd, const VehicleParams& params,
                     const world::Scene& scene, double dt) {
  return StepCarChecked(state, cmd, params, scene, dt).state;
}

}  // namespace agsim
