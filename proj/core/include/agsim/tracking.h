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

#ifndef AGSIM_TRACKING_H_
#define AGSIM_TRACKING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/vehicles.h"
#include "agsim/world.h"

namespace agsim::tracking {

// Scripted kinematic target moving along a polyline at constant speed.
struct TargetScript {
  std::vector<Vec3> waypoints;
  double speed = 2.0;
  bool loop = false;  // closes the polyline back to the first waypoint
};

// Throws ValidationError.
void Validate(const TargetScript& script);

struct TargetSample {
  Vec3 position;
  Vec3 velocity;
  double yaw = 0.0;
};

// Position after traveling speed * t along the script. A non-looping target
// stops at its last waypoint.
TargetSample SampleTarget(const TargetScript& script, double t);

struct StandoffParams {
  double desired_distance = 14.0;  // 3-D distance to the target
  double gain = 0.8;
  std::optional<double> observer_altitude;  // UAV only, up-positive
};

void Validate(const StandoffParams& params);

struct TargetObservation {
  SimTime stamp;
  std::string observer_id;
  Vec3 target_position;
  bool visible = false;
};

// Ground truth gated by line of sight from the observer's sensor point to the
// target point. When occluded the observation carries `last_estimate`.
TargetObservation ObserveTarget(const world::Scene& scene, const std::string& observer_id,
                                const Vec3& observer_point, const Vec3& target_point,
                                const Vec3& last_estimate, SimTime stamp);

// Mean of the visible observations; `previous` when none is visible.
Vec3 FuseObservations(std::span<const TargetObservation> observations, const Vec3& previous);

// Horizontal distance at which an observer `height_diff` above the target is
// at 3-D distance `desired` (0 if the height difference alone exceeds it).
double HorizontalStandoff(double desired, double height_diff);

// Point on the target-agent horizontal line where the agent would sit at the
// desired 3-D distance, keeping the agent's current height.
Vec3 StandoffPoint(const Vec3& agent, const Vec3& target, double desired);

// Horizontal distance from the agent to its standoff point.
double XyError(const Vec3& agent, const Vec3& target, double desired);

// Absolute heading error to the target bearing, degrees in [0, 180].
double YawErrorDeg(const NedPose& pose, const Vec3& target);

// UAV standoff: horizontal velocity gain * (distance - desired) along the
// bearing to the target plus the target's horizontal velocity, clipped to
// max_speed; altitude held at observer_altitude; yaw at the target.
UavCommand StandoffCommandUav(const VehicleState& agent, const Vec3& target,
                              const Vec3& target_velocity, const StandoffParams& params,
                              const UavParams& uav);

// UGV standoff: signed speed gain * (distance - desired) plus the target's
// speed along the bearing, so the car retreats when inside the standoff
// circle; steering pursues the target bearing (mirrored while reversing).
CarCommand StandoffCommandCar(const VehicleState& agent, const Vec3& target,
                              const Vec3& target_velocity, const StandoffParams& params,
                              const CarParams& car);

struct CirclePattern {
  Vec3 center;
  double radius = 10.0;
  double angular_speed = 0.1;  // rad/s
};

struct SquarePattern {
  Vec3 center;
  double side = 20.0;
  double altitude = 10.0;
  double speed = 2.0;
};

struct FormationSpec {
  CirclePattern ugv;
  SquarePattern uav;
  int ugv_count = 3;
  int uav_count = 4;
};

void Validate(const FormationSpec& spec);

struct FormationReference {
  Vec3 position;
  Vec3 velocity;
};

// UGV k sits at phase w t + 2 pi k / n on the circle (d = center.d).
FormationReference UgvReference(const FormationSpec& spec, int k, double t);
// UAV k travels the square circuit from corner 0 with arc offset
// k * perimeter / m. Corners run (-,-), (+,-), (+,+), (-,+) in (n, e) offsets.
FormationReference UavReference(const FormationSpec& spec, int k, double t);

CarCommand FormationCommandCar(const FormationSpec& spec, int k, const VehicleState& state,
                               double t, const CarParams& car);
UavCommand FormationCommandUav(const FormationSpec& spec, int k, const VehicleState& state,
                               double t, const UavParams& uav);

}  // namespace agsim::tracking

#endif  // AGSIM_TRACKING_H_
