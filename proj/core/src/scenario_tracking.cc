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
#include "agsim/metrics.h"
#include "agsim/scenario.h"
#include "agsim/tracking.h"
#include "json_util.h"
#include "scenario_internal.h"

namespace agsim::scenario {
namespace {

using nlohmann::json;
using ::agsim::internal::Vec3Json;

struct AgentSeries {
  std::vector<double> xy_err;
  std::vector<double> distance;
  std::vector<double> steady_abs_err;
};

json AgentJson(const std::string& id, const AgentSeries& s, double desired) {
  const metrics::ErrorStats xy = metrics::ComputeErrorStats(s.xy_err);
  const metrics::ErrorStats steady = metrics::ComputeErrorStats(s.steady_abs_err);
  double steady_distance = 0.0;
  const std::size_t first = s.distance.size() - s.steady_abs_err.size();
  for (std::size_t i = first; i < s.distance.size(); ++i) steady_distance += s.distance[i];
  steady_distance /= static_cast<double>(s.steady_abs_err.size());
  return {{"vehicle_id", id},
          {"mean_xy_err_m", xy.mean},
          {"var_xy_err_m2", xy.variance},
          {"max_xy_err_m", xy.max},
          {"desired_distance_m", desired},
          {"steady_mean_distance_m", steady_distance},
          {"steady_abs_distance_err_m", steady.mean},
          {"steady_max_abs_distance_err_m", steady.max}};
}

}  // namespace

RunResult RunTracking(sim::Simulation& sim, const TrackingTask& task, const std::filesystem::path& out) {
  tracking::Validate(task.uav);
  tracking::Validate(task.ugv);
  sim.SetTarget(task.target);
  const world::Scene& scene = sim.scene();
  const double dt = sim.config().dt;
  const double duration = static_cast<double>(sim.total_ticks()) * dt;
  const double steady_from = duration * (1.0 - task.steady_fraction);
  const Vec3 target_lift{0.0, 0.0, -task.target_height};
  const Vec3 sensor_lift{0.0, 0.0, -task.ugv_sensor_height};

  std::string distance_csv =
      "tick,seconds,uav_distance_m,ugv_distance_m,uav_visible,ugv_visible,fused_err_m\n";
  std::string yaw_csv = "tick,seconds,ugv_yaw_err_deg,uav_yaw_err_deg\n";
  AgentSeries uav_series;
  AgentSeries ugv_series;
  std::vector<double> yaw_after_settle;
  std::vector<double> yaw_steady;
  std::uint64_t uav_occluded = 0;
  std::uint64_t ugv_occluded = 0;
  std::uint64_t both_occluded = 0;
  std::optional<double> occlusion_first;
  double occlusion_last = 0.0;
  double max_fused_err = 0.0;
  double max_fused_err_occluded = 0.0;

  detail::Stepper stepper(sim);
  auto snap = sim.Latest();
  Vec3 estimate = snap->target->sample.position;
  Vec3 estimate_velocity;
  while (true) {
    const double t = snap->time.seconds();
    const VehicleState& uav = detail::StateOf(*snap, task.uav_id);
    const VehicleState& ugv = detail::StateOf(*snap, task.ugv_id);
    const tracking::TargetSample& truth = snap->target->sample;

    // Observation and fusion.
    const Vec3 target_point = truth.position + target_lift;
    const tracking::TargetObservation obs[2] = {
        tracking::ObserveTarget(scene, task.uav_id, uav.pose.position, target_point, estimate,
                                snap->time),
        tracking::ObserveTarget(scene, task.ugv_id, ugv.pose.position + sensor_lift, target_point,
                                estimate, snap->time)};
    // Observations locate the observed point; the estimate tracks the target origin.
    tracking::TargetObservation grounded[2] = {obs[0], obs[1]};
    for (auto& o : grounded) {
      if (o.visible) o.target_position = o.target_position - target_lift;
    }
    const Vec3 fused = tracking::FuseObservations(grounded, estimate);
    const bool any_visible = obs[0].visible || obs[1].visible;
    if (any_visible && snap->time.tick > 0) estimate_velocity = (fused - estimate) / dt;
    estimate = fused;

    // Metrics against ground truth.
    const double fused_err = Distance(estimate, truth.position);
    max_fused_err = std::max(max_fused_err, fused_err);
    if (!obs[0].visible) {
      ++uav_occluded;
      if (!occlusion_first) occlusion_first = t;
      occlusion_last = t;
      max_fused_err_occluded = std::max(max_fused_err_occluded, fused_err);
    }
    if (!obs[1].visible) ++ugv_occluded;
    if (!any_visible) ++both_occluded;
    const double uav_distance = Distance(uav.pose.position, truth.position);
    const double ugv_distance = Distance(ugv.pose.position, truth.position);
    uav_series.distance.push_back(uav_distance);
    ugv_series.distance.push_back(ugv_distance);
    uav_series.xy_err.push_back(
        tracking::XyError(uav.pose.position, truth.position, task.uav.desired_distance));
    ugv_series.xy_err.push_back(
        tracking::XyError(ugv.pose.position, truth.position, task.ugv.desired_distance));
    const double ugv_yaw = tracking::YawErrorDeg(ugv.pose, truth.position);
    const double uav_yaw = tracking::YawErrorDeg(uav.pose, truth.position);
    if (t >= task.yaw_settle_s) yaw_after_settle.push_back(ugv_yaw);
    if (t >= steady_from) {
      uav_series.steady_abs_err.push_back(std::abs(uav_distance - task.uav.desired_distance));
      ugv_series.steady_abs_err.push_back(std::abs(ugv_distance - task.ugv.desired_distance));
      yaw_steady.push_back(ugv_yaw);
    }
    distance_csv += fmt::format("{},{:.6f},{:.6f},{:.6f},{},{},{:.6f}\n", snap->time.tick, t,
                                uav_distance, ugv_distance, obs[0].visible ? 1 : 0,
                                obs[1].visible ? 1 : 0, fused_err);
    yaw_csv += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", snap->time.tick, t, ugv_yaw, uav_yaw);

    if (sim.Finished()) break;
    sim.Submit(task.uav_id, tracking::StandoffCommandUav(uav, estimate, estimate_velocity, task.uav,
                                                         sim.params().uav));
    sim.Submit(task.ugv_id, tracking::StandoffCommandCar(ugv, estimate, estimate_velocity, task.ugv,
                                                         sim.params().car));
    stepper.Step();
    snap = sim.Latest();
  }
  if (uav_series.steady_abs_err.empty()) throw TaskFailure("tracking run has no steady-state window");

  const auto distance_path = out / "distance_series.csv";
  const auto yaw_path = out / "yaw_err_series.csv";
  detail::WriteText(distance_path, distance_csv);
  detail::WriteText(yaw_path, yaw_csv);

  const double yaw_settled =
      yaw_after_settle.empty() ? 0.0 : metrics::ComputeErrorStats(yaw_after_settle).mean;
  json occlusion = {{"uav_occluded_ticks", uav_occluded},
                    {"ugv_occluded_ticks", ugv_occluded},
                    {"both_occluded_ticks", both_occluded},
                    {"max_fused_err_during_uav_occlusion_m", max_fused_err_occluded}};
  if (occlusion_first) {
    occlusion["uav_occlusion_interval_s"] = json::array({*occlusion_first, occlusion_last});
  } else {
    occlusion["uav_occlusion_interval_s"] = nullptr;
  }

  RunResult result;
  result.report = {
      {"task", "tracking"},
      {"uav", AgentJson(task.uav_id, uav_series, task.uav.desired_distance)},
      {"ugv", AgentJson(task.ugv_id, ugv_series, task.ugv.desired_distance)},
      {"distance_series_csv_path", distance_path.filename().string()},
      {"yaw_err_series_csv_path", yaw_path.filename().string()},
      {"summary",
       {{"agents", json::array({"uav", "ugv"})},
        {"duration_s", duration},
        {"steady_window_s", json::array({steady_from, duration})},
        {"yaw_settle_s", task.yaw_settle_s},
        {"ugv_mean_yaw_err_after_settle_deg", yaw_settled},
        {"ugv_mean_yaw_err_steady_deg", metrics::ComputeErrorStats(yaw_steady).mean},
        {"max_fused_err_m", max_fused_err},
        {"occlusion", std::move(occlusion)},
        {"target_final", Vec3Json(snap->target->sample.position)}}}};
  result.artifacts = {distance_path, yaw_path};
  return result;
}

}  // namespace agsim::scenario
