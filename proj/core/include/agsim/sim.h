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

#ifndef AGSIM_SIM_H_
#define AGSIM_SIM_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/rng.h"
#include "agsim/sensors.h"
#include "agsim/tracking.h"
#include "agsim/vehicles.h"
#include "agsim/world.h"

namespace agsim::sim {

struct SimConfig {
  double dt = 0.02;
  double duration = 10.0;
  std::uint64_t seed = 0;
  double realtime_factor = 0.0;  // 0 steps as fast as possible
};

// Throws ValidationError.
void Validate(const SimConfig& config);
// Number of ticks in a run: round(duration / dt).
std::uint64_t TotalTicks(const SimConfig& config);

struct SensorSuiteConfig {
  std::optional<sensors::LidarConfig> lidar;
  int lidar_period_ticks = 1;
  std::optional<sensors::DepthConfig> depth;
  int depth_period_ticks = 1;
};

void Validate(const SensorSuiteConfig& config);

struct LidarFrame {
  sensors::PointCloud cloud;  // sensor frame
  NedPose sensor_pose;        // world pose of the sensor at capture
};

struct VehicleSnapshot {
  VehicleState state;
  std::shared_ptr<const LidarFrame> lidar;  // latest frame, may be older than state
  std::shared_ptr<const sensors::DepthGrid> depth;
  bool lidar_fresh = false;  // produced on this snapshot's tick
  bool depth_fresh = false;
};

struct TargetTruth {
  SimTime stamp;
  tracking::TargetSample sample;
};

// Immutable view of the world after one tick.
struct Snapshot {
  SimTime time;
  std::map<std::string, VehicleSnapshot, std::less<>> vehicles;
  std::optional<TargetTruth> target;
};

struct VehicleInfo {
  std::string id;
  VehicleType type;
  bool has_lidar = false;
  bool has_depth = false;
};

class Simulation;

// Per-vehicle API scoped to a single registered id.
class VehicleApi {
 public:
  VehicleApi(Simulation* sim, std::string id, VehicleType type)
      : sim_(sim), id_(std::move(id)), type_(type) {}

  const std::string& id() const { return id_; }
  VehicleType type() const { return type_; }
  VehicleState State() const;
  sensors::Odometry Odometry() const;
  // Throw NoSuchSensor when the vehicle has no such sensor.
  std::shared_ptr<const LidarFrame> Lidar() const;
  std::shared_ptr<const sensors::DepthGrid> Depth() const;
  // Enqueues the command; returns the tick at which it was accepted.
  SimTime SendCommand(const VehicleCommand& cmd) const;

 private:
  Simulation* sim_;
  std::string id_;
  VehicleType type_;
};

struct RealtimeStats {
  std::uint64_t ticks = 0;
  std::uint64_t overruns = 0;  // steps that finished after their deadline
  double max_lateness_s = 0.0;
};

// Lockstep engine. One thread calls Step(); any thread may submit commands or
// read snapshots.
class Simulation {
 public:
  Simulation(std::shared_ptr<const world::Scene> scene, const SimConfig& config,
             const VehicleParams& params = {});

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Throws DuplicateId, ValidationError.
  VehicleApi RegisterVehicle(const std::string& id, VehicleType type, const NedPose& initial,
                             const SensorSuiteConfig& sensors = {});
  std::optional<VehicleApi> Vehicle(std::string_view id);
  std::vector<VehicleInfo> ListVehicles() const;
  std::optional<VehicleInfo> Info(std::string_view id) const;

  void SetTarget(const tracking::TargetScript& script);
  bool HasTarget() const { return target_.has_value(); }

  // Latest-wins mailbox. Throws UnknownVehicle, TypeMismatch, ValidationError.
  SimTime Submit(std::string_view id, const VehicleCommand& cmd);

  // Applies pending commands, advances every vehicle by dt and the clock by
  // one tick, refreshes due sensors and publishes the new snapshot.
  SimTime Step();
  // Steps until TotalTicks.
  void RunToEnd();
  // Paces Step() at dt / realtime_factor until `stop` is set or, when
  // `honor_duration`, the run is complete.
  RealtimeStats RunRealtime(const std::atomic<bool>& stop, bool honor_duration = true);

  SimTime Now() const;
  bool Finished() const { return Now().tick >= total_ticks_; }
  std::shared_ptr<const Snapshot> Latest() const;

  const world::Scene& scene() const { return *scene_; }
  const SimConfig& config() const { return config_; }
  const VehicleParams& params() const { return params_; }
  std::uint64_t total_ticks() const { return total_ticks_; }

  // Called after each published snapshot, on the stepping thread.
  void SetObserver(std::function<void(const Snapshot&)> observer) {
    observer_ = std::move(observer);
  }

  // Trajectory CSV: header plus one row per vehicle per stepped tick.
  static constexpr const char* kTrajectoryHeader = "tick,seconds,vehicle_id,n,e,d,yaw,vn,ve,vd";
  const std::string& TrajectoryCsv() const { return trajectory_; }
  void WriteTrajectory(const std::filesystem::path& path) const;

 private:
  struct Entry {
    VehicleState state;
    SensorSuiteConfig sensors;
    std::optional<VehicleCommand> active;
    Rng rng;
    std::shared_ptr<const LidarFrame> lidar;
    std::shared_ptr<const sensors::DepthGrid> depth;
  };

  void Refresh(Entry& entry, SimTime now, bool force, VehicleSnapshot& out);
  void Publish(std::shared_ptr<const Snapshot> snapshot);
  VehicleState Advance(Entry& entry);

  std::shared_ptr<const world::Scene> scene_;
  SimConfig config_;
  VehicleParams params_;
  std::uint64_t total_ticks_;
  std::optional<tracking::TargetScript> target_;

  // Owned by the stepping thread (registration happens before stepping).
  std::map<std::string, Entry, std::less<>> entries_;
  SimTime now_;
  std::string trajectory_;
  std::function<void(const Snapshot&)> observer_;

  mutable std::mutex registry_mutex_;  // guards info_
  std::map<std::string, VehicleInfo, std::less<>> info_;

  std::mutex mailbox_mutex_;
  std::map<std::string, VehicleCommand, std::less<>> mailbox_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace agsim::sim

#endif  // AGSIM_SIM_H_
