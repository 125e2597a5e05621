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

#include "agsim/sim.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "agsim/error.h"
#include "fmt/format.h"

namespace agsim::sim {
namespace {

// Distance at which a car in waypoint mode stops.
constexpr double kCarWaypointCapture = 1.0;

void AppendRow(std::string& out, const VehicleState& s) {
  const Vec3& p = s.pose.position;
  fmt::format_to(std::back_inserter(out), "{},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n",
                 s.stamp.tick, s.stamp.seconds(), s.id, p.n, p.e, p.d, s.pose.Yaw(), s.velocity.n,
                 s.velocity.e, s.velocity.d);
}

}  // namespace

void Validate(const SimConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw ValidationError("sim.dt must be > 0");
  if (!(config.duration > 0.0) || !std::isfinite(config.duration)) {
    throw ValidationError("sim.duration must be > 0");
  }
  if (!(config.realtime_factor >= 0.0)) throw ValidationError("sim.realtime_factor must be >= 0");
}

std::uint64_t TotalTicks(const SimConfig& config) {
  return static_cast<std::uint64_t>(std::llround(config.duration / config.dt));
}

void Validate(const SensorSuiteConfig& config) {
  if (config.lidar) sensors::Validate(*config.lidar);
  if (config.depth) sensors::Validate(*config.depth);
  if (config.lidar_period_ticks < 1 || config.depth_period_ticks < 1) {
    throw ValidationError("sensor period_ticks must be >= 1");
  }
}

VehicleState VehicleApi::State() const {
  const auto snap = sim_->Latest();
  return snap->vehicles.find(id_)->second.state;
}

sensors::Odometry VehicleApi::Odometry() const {
  const VehicleState s = State();
  return {s.id, s.stamp, s.pose, s.velocity};
}

std::shared_ptr<const LidarFrame> VehicleApi::Lidar() const {
  const auto snap = sim_->Latest();
  const auto& v = snap->vehicles.find(id_)->second;
  if (!v.lidar) throw NoSuchSensor("vehicle '" + id_ + "' has no lidar");
  return v.lidar;
}

std::shared_ptr<const sensors::DepthGrid> VehicleApi::Depth() const {
  const auto snap = sim_->Latest();
  const auto& v = snap->vehicles.find(id_)->second;
  if (!v.depth) throw NoSuchSensor("vehicle '" + id_ + "' has no depth camera");
  return v.depth;
}

SimTime VehicleApi::SendCommand(const VehicleCommand& cmd) const { return sim_->Submit(id_, cmd); }

Simulation::Simulation(std::shared_ptr<const world::Scene> scene, const SimConfig& config,
                       const VehicleParams& params)
    : scene_(std::move(scene)), config_(config), params_(params) {
  Validate(config);
  ValidateParams(params);
  if (!scene_) throw ValidationError("simulation needs a scene");
  total_ticks_ = TotalTicks(config);
  now_ = {0, config.dt};
  trajectory_ = std::string(kTrajectoryHeader) + "\n";
  auto snap = std::make_shared<Snapshot>();
  snap->time = now_;
  snapshot_ = std::move(snap);
}

VehicleApi Simulation::RegisterVehicle(const std::string& id, VehicleType type,
                                       const NedPose& initial, const SensorSuiteConfig& sensors) {
  if (id.empty()) throw ValidationError("vehicle id must be nonempty");
  Validate(sensors);
  if (!initial.position.IsFinite()) throw ValidationError("vehicle '" + id + "' pose is not finite");
  if (entries_.count(id) > 0) throw DuplicateId("vehicle id '" + id + "' is already registered");

  VehicleState state;
  state.id = id;
  state.vtype = type;
  state.pose = initial;
  state.stamp = now_;
  Entry entry{state, sensors, std::nullopt, Rng(config_.seed, id), nullptr, nullptr};

  auto snap = std::make_shared<Snapshot>(*Latest());
  VehicleSnapshot view;
  view.state = state;
  Refresh(entry, now_, true, view);
  snap->vehicles[id] = view;
  entries_.emplace(id, std::move(entry));
  {
    std::lock_guard lock(registry_mutex_);
    info_[id] = {id, type, sensors.lidar.has_value(), sensors.depth.has_value()};
  }
  Publish(std::move(snap));
  return VehicleApi(this, id, type);
}

std::optional<VehicleApi> Simulation::Vehicle(std::string_view id) {
  const auto info = Info(id);
  if (!info) return std::nullopt;
  return VehicleApi(this, info->id, info->type);
}

std::vector<VehicleInfo> Simulation::ListVehicles() const {
  std::lock_guard lock(registry_mutex_);
  std::vector<VehicleInfo> out;
  for (const auto& [id, info] : info_) out.push_back(info);
  return out;
}

std::optional<VehicleInfo> Simulation::Info(std::string_view id) const {
  std::lock_guard lock(registry_mutex_);
  const auto it = info_.find(id);
  if (it == info_.end()) return std::nullopt;
  return it->second;
}

void Simulation::SetTarget(const tracking::TargetScript& script) {
  tracking::Validate(script);
  target_ = script;
  auto snap = std::make_shared<Snapshot>(*Latest());
  snap->target = TargetTruth{now_, tracking::SampleTarget(script, now_.seconds())};
  Publish(std::move(snap));
}

SimTime Simulation::Submit(std::string_view id, const VehicleCommand& cmd) {
  const auto info = Info(id);
  if (!info) throw UnknownVehicle("unknown vehicle '" + std::string(id) + "'");
  if (const auto* uav = std::get_if<UavCommand>(&cmd)) {
    if (info->type != VehicleType::kMultirotor) {
      throw TypeMismatch("vehicle '" + std::string(id) + "' is not a multirotor");
    }
    ValidateCommand(*uav);
  } else {
    if (info->type != VehicleType::kCar) {
      throw TypeMismatch("vehicle '" + std::string(id) + "' is not a car");
    }
    ValidateCommand(std::get<CarCommand>(cmd), params_.car);
  }
  const SimTime accepted = Now();
  std::lock_guard lock(mailbox_mutex_);
  mailbox_.insert_or_assign(std::string(id), cmd);
  return accepted;
}

VehicleState Simulation::Advance(Entry& entry) {
  const VehicleState& s = entry.state;
  if (s.vtype == VehicleType::kMultirotor) {
    UavCommand cmd = UavCommand::Velocity({}, s.pose.Yaw());
    if (entry.active) cmd = std::get<UavCommand>(*entry.active);
    return StepUav(s, cmd, params_, config_.dt, scene_->ground_d());
  }
  CarCommand cmd = CarCommand::Drive(0.0, 0.0);
  if (entry.active) cmd = std::get<CarCommand>(*entry.active);
  if (cmd.mode == CarCommand::Mode::kWaypoint) {
    const bool arrived = HorizontalDistance(s.pose.position, cmd.waypoint) <= kCarWaypointCapture;
    cmd = arrived ? CarCommand::Drive(0.0, 0.0)
                  : CarCommand::Drive(cmd.speed_cmd, PursuitSteer(s.pose, cmd.waypoint, params_.car));
  }
  return StepCar(s, cmd, params_, *scene_, config_.dt);
}

void Simulation::Refresh(Entry& entry, SimTime now, bool force, VehicleSnapshot& out) {
  const SensorSuiteConfig& cfg = entry.sensors;
  if (cfg.lidar && (force || now.tick % cfg.lidar_period_ticks == 0)) {
    auto frame = std::make_shared<LidarFrame>();
    frame->cloud = sensors::LidarScan(*scene_, entry.state.pose, *cfg.lidar, &entry.rng,
                                      entry.state.id + "/lidar", now);
    frame->sensor_pose = sensors::SensorPose(entry.state.pose, cfg.lidar->mount);
    entry.lidar = std::move(frame);
    out.lidar_fresh = true;
  }
  if (cfg.depth && (force || now.tick % cfg.depth_period_ticks == 0)) {
    entry.depth = std::make_shared<sensors::DepthGrid>(
        sensors::CaptureDepth(*scene_, entry.state.pose, *cfg.depth, now));
    out.depth_fresh = true;
  }
  out.lidar = entry.lidar;
  out.depth = entry.depth;
}

SimTime Simulation::Step() {
  {
    std::lock_guard lock(mailbox_mutex_);
    for (auto& [id, cmd] : mailbox_) entries_.find(id)->second.active = std::move(cmd);
    mailbox_.clear();
  }
  const SimTime next{now_.tick + 1, config_.dt};
  auto snap = std::make_shared<Snapshot>();
  snap->time = next;
  for (auto& [id, entry] : entries_) {
    entry.state = Advance(entry);
    VehicleSnapshot view;
    view.state = entry.state;
    Refresh(entry, next, false, view);
    snap->vehicles.emplace(id, std::move(view));
    AppendRow(trajectory_, entry.state);
  }
  if (target_) snap->target = TargetTruth{next, tracking::SampleTarget(*target_, next.seconds())};
  now_ = next;
  Publish(snap);
  if (observer_) observer_(*snap);
  return next;
}

void Simulation::RunToEnd() {
  while (!Finished()) Step();
}

RealtimeStats Simulation::RunRealtime(const std::atomic<bool>& stop, bool honor_duration) {
  using Clock = std::chrono::steady_clock;
  RealtimeStats stats;
  const bool paced = config_.realtime_factor > 0.0;
  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(paced ? config_.dt / config_.realtime_factor : 0.0));
  auto deadline = Clock::now();
  while (!stop.load() && !(honor_duration && Finished())) {
    deadline += period;
    Step();
    ++stats.ticks;
    if (!paced) continue;
    const auto now = Clock::now();
    if (now > deadline) {
      ++stats.overruns;
      stats.max_lateness_s =
          std::max(stats.max_lateness_s, std::chrono::duration<double>(now - deadline).count());
    } else {
      std::this_thread::sleep_until(deadline);
    }
  }
  return stats;
}

SimTime Simulation::Now() const { return Latest()->time; }

std::shared_ptr<const Snapshot> Simulation::Latest() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void Simulation::Publish(std::shared_ptr<const Snapshot> snapshot) {
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snapshot);
}

void Simulation::WriteTrajectory(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trajectory '" + path.string() + "'");
  out << trajectory_;
}

}  // namespace agsim::sim
