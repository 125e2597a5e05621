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

#include "agsim/tracking.h"

#include <algorithm>
#include <cmath>

#include "agsim/error.h"

namespace agsim::tracking {
namespace {

Vec3 Horizontal(const Vec3& v) { return {v.n, v.e, 0.0}; }

Vec3 ClipNorm(const Vec3& v, double limit) {
  const double norm = v.Norm();
  return norm > limit ? v * (limit / norm) : v;
}

// Lead time used to place the pursuit point ahead of a moving reference.
constexpr double kFormationLead = 1.0;

}  // namespace

void Validate(const TargetScript& script) {
  if (script.waypoints.size() < 2) throw ValidationError("target script needs >= 2 waypoints");
  if (!(script.speed > 0.0)) throw ValidationError("target speed must be > 0");
  for (const auto& w : script.waypoints) {
    if (!w.IsFinite()) throw ValidationError("target waypoints must be finite");
  }
}

TargetSample SampleTarget(const TargetScript& script, double t) {
  std::vector<Vec3> points = script.waypoints;
  if (script.loop) points.push_back(points.front());
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += Distance(points[i - 1], points[i]);

  double s = script.speed * std::max(t, 0.0);
  bool stopped = false;
  if (script.loop && total > 0.0) {
    s = std::fmod(s, total);
  } else if (s >= total) {
    s = total;
    stopped = true;
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec3 seg = points[i] - points[i - 1];
    const double len = seg.Norm();
    if (len == 0.0) continue;
    if (s <= len || i + 1 == points.size()) {
      const Vec3 dir = seg / len;
      TargetSample out;
      out.position = points[i - 1] + dir * std::min(s, len);
      out.velocity = stopped ? Vec3{} : dir * script.speed;
      out.yaw = std::atan2(dir.e, dir.n);
      return out;
    }
    s -= len;
  }
  return {points.front(), {}, 0.0};
}

void Validate(const StandoffParams& params) {
  if (!(params.desired_distance > 0.0)) throw ValidationError("desired_distance must be > 0");
  if (!(params.gain > 0.0)) throw ValidationError("standoff gain must be > 0");
}

TargetObservation ObserveTarget(const world::Scene& scene, const std::string& observer_id,
                                const Vec3& observer_point, const Vec3& target_point,
                                const Vec3& last_estimate, SimTime stamp) {
  TargetObservation obs{stamp, observer_id, last_estimate, false};
  if (world::LineOfSight(scene, observer_point, target_point)) {
    obs.visible = true;
    obs.target_position = target_point;
  }
  return obs;
}

Vec3 FuseObservations(std::span<const TargetObservation> observations, const Vec3& previous) {
  Vec3 sum;
  int count = 0;
  for (const auto& obs : observations) {
    if (!obs.visible) continue;
    sum += obs.target_position;
    ++count;
  }
  return count == 0 ? previous : sum / static_cast<double>(count);
}

double HorizontalStandoff(double desired, double height_diff) {
  const double sq = desired * desired - height_diff * height_diff;
  return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

Vec3 StandoffPoint(const Vec3& agent, const Vec3& target, double desired) {
  const double r = HorizontalStandoff(desired, agent.d - target.d);
  const Vec3 away = Horizontal(agent - target);
  const double norm = away.Norm();
  const Vec3 dir = norm > 0.0 ? away / norm : Vec3{-1.0, 0.0, 0.0};
  Vec3 point = target + dir * r;
  point.d = agent.d;
  return point;
}

double XyError(const Vec3& agent, const Vec3& target, double desired) {
  return HorizontalDistance(agent, StandoffPoint(agent, target, desired));
}

double YawErrorDeg(const NedPose& pose, const Vec3& target) {
  const double bearing = std::atan2(target.e - pose.position.e, target.n - pose.position.n);
  return std::abs(RadToDeg(WrapAngle(bearing - pose.Yaw())));
}

UavCommand StandoffCommandUav(const VehicleState& agent, const Vec3& target,
                              const Vec3& target_velocity, const StandoffParams& params,
                              const UavParams& uav) {
  const Vec3& pos = agent.pose.position;
  const Vec3 toward = Horizontal(target - pos);
  const double horizontal = toward.Norm();
  const double error = Distance(pos, target) - params.desired_distance;

  Vec3 velocity = Horizontal(target_velocity);
  double yaw = agent.pose.Yaw();
  if (horizontal > 1e-9) {
    velocity += toward * (params.gain * error / horizontal);
    yaw = std::atan2(toward.e, toward.n);
  }
  velocity = ClipNorm(velocity, uav.max_speed);
  if (params.observer_altitude) {
    velocity.d = std::clamp(params.gain * (-*params.observer_altitude - pos.d), -uav.max_climb,
                            uav.max_climb);
  }
  return UavCommand::Velocity(velocity, yaw, uav.max_speed);
}

CarCommand StandoffCommandCar(const VehicleState& agent, const Vec3& target,
                              const Vec3& target_velocity, const StandoffParams& params,
                              const CarParams& car) {
  const Vec3& pos = agent.pose.position;
  const Vec3 toward = Horizontal(target - pos);
  const double horizontal = toward.Norm();
  if (horizontal < 1e-9) return CarCommand::Drive(0.0, 0.0);
  const Vec3 bearing = toward / horizontal;
  const double error = Distance(pos, target) - params.desired_distance;
  const double speed = std::clamp(target_velocity.Dot(bearing) + params.gain * error,
                                  -car.max_speed, car.max_speed);
  double steer = PursuitSteer(agent.pose, target, car);
  if (speed < 0.0) steer = -steer;
  return CarCommand::Drive(speed, steer);
}

void Validate(const FormationSpec& spec) {
  if (!(spec.ugv.radius > 0.0)) throw ValidationError("circle radius must be > 0");
  if (!(spec.uav.side > 0.0)) throw ValidationError("square side must be > 0");
  if (!(spec.uav.speed > 0.0)) throw ValidationError("square speed must be > 0");
  if (!std::isfinite(spec.ugv.angular_speed)) throw ValidationError("angular_speed must be finite");
  if (spec.ugv_count < 0 || spec.uav_count < 0) throw ValidationError("counts must be >= 0");
}

FormationReference UgvReference(const FormationSpec& spec, int k, double t) {
  const CirclePattern& c = spec.ugv;
  const double phase = c.angular_speed * t + 2.0 * kPi * k / std::max(spec.ugv_count, 1);
  return {{c.center.n + c.radius * std::cos(phase), c.center.e + c.radius * std::sin(phase),
           c.center.d},
          {-c.radius * c.angular_speed * std::sin(phase),
           c.radius * c.angular_speed * std::cos(phase), 0.0}};
}

FormationReference UavReference(const FormationSpec& spec, int k, double t) {
  const SquarePattern& sq = spec.uav;
  const double half = 0.5 * sq.side;
  const Vec3 corners[4] = {{sq.center.n - half, sq.center.e - half, 0.0},
                           {sq.center.n + half, sq.center.e - half, 0.0},
                           {sq.center.n + half, sq.center.e + half, 0.0},
                           {sq.center.n - half, sq.center.e + half, 0.0}};
  const double perimeter = 4.0 * sq.side;
  double arc = std::fmod(sq.speed * t + k * perimeter / std::max(spec.uav_count, 1), perimeter);
  if (arc < 0.0) arc += perimeter;
  const int side = std::min(3, static_cast<int>(arc / sq.side));
  const double along = arc - side * sq.side;
  const Vec3 dir = (corners[(side + 1) % 4] - corners[side]) / sq.side;
  Vec3 position = corners[side] + dir * along;
  position.d = -sq.altitude;
  return {position, dir * sq.speed};
}

CarCommand FormationCommandCar(const FormationSpec& spec, int k, const VehicleState& state,
                               double t, const CarParams& car) {
  const FormationReference now = UgvReference(spec, k, t);
  const FormationReference lead = UgvReference(spec, k, t + kFormationLead);
  const double nominal = now.velocity.Norm();
  const double yaw = state.pose.Yaw();
  const Vec3 heading{std::cos(yaw), std::sin(yaw), 0.0};
  const double along = Horizontal(now.position - state.pose.position).Dot(heading);
  const double speed = std::clamp(nominal + 0.8 * along, 0.0, car.max_speed);
  return CarCommand::Drive(speed, PursuitSteer(state.pose, lead.position, car));
}

UavCommand FormationCommandUav(const FormationSpec& spec, int k, const VehicleState& state,
                               double t, const UavParams& uav) {
  const FormationReference ref = UavReference(spec, k, t);
  const Vec3 velocity = ClipNorm(ref.velocity + (ref.position - state.pose.position), uav.max_speed);
  return UavCommand::Velocity(velocity, 0.0, uav.max_speed);
}

}  // namespace agsim::tracking
