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

#ifndef AGSIM_SENSORS_H_
#define AGSIM_SENSORS_H_

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/rng.h"
#include "agsim/vehicles.h"
#include "agsim/world.h"

namespace agsim::sensors {

struct LidarConfig {
  int channels = 16;
  double vfov_min_deg = -15.0;
  double vfov_max_deg = 15.0;
  double hfov_deg = 360.0;
  int points_per_channel = 360;
  double max_range = 100.0;
  double noise_sigma = 0.0;
  RigidTransform mount;  // sensor pose in the body frame
};

// Throws ValidationError.
void Validate(const LidarConfig& cfg);

struct PointCloud {
  std::string frame_id;
  SimTime stamp;
  std::vector<Vec3> points;
};

struct Odometry {
  std::string vehicle_id;
  SimTime stamp;
  NedPose pose;
  Vec3 velocity;
};

// Pinhole depth camera; the optical axis is the sensor x axis.
struct DepthConfig {
  int width = 64;
  int height = 48;
  double hfov_deg = 90.0;
  double max_range = 500.0;
  RigidTransform mount;
};

void Validate(const DepthConfig& cfg);

inline constexpr double kNoReturn = std::numeric_limits<double>::infinity();

struct DepthGrid {
  SimTime stamp;
  int width = 0;
  int height = 0;
  double hfov_deg = 0.0;
  double max_range = 0.0;
  std::vector<double> ranges;  // row-major, kNoReturn for misses
  RigidTransform mount;

  double At(int row, int col) const { return ranges[static_cast<std::size_t>(row) * width + col]; }
};

// World pose of a sensor mounted at `mount` on a vehicle at `vehicle_pose`.
NedPose SensorPose(const NedPose& vehicle_pose, const RigidTransform& mount);

// Unit ray direction in the sensor frame for one LiDAR beam.
Vec3 LidarBeamDirection(const LidarConfig& cfg, int channel, int index);
// Unit ray direction in the sensor frame for one depth pixel.
Vec3 DepthPixelDirection(int width, int height, double hfov_deg, int row, int col);

// Casts every beam from the mounted sensor. Hits become points in the sensor
// frame with Gaussian range noise; misses are omitted. `rng` may be null only
// when noise_sigma is 0.
PointCloud LidarScan(const world::Scene& scene, const NedPose& vehicle_pose,
                     const LidarConfig& cfg, Rng* rng, std::string frame_id = "lidar",
                     SimTime stamp = {});

DepthGrid CaptureDepth(const world::Scene& scene, const NedPose& vehicle_pose,
                       const DepthConfig& cfg, SimTime stamp = {});

// Sensor-frame cloud to world frame using the sensor's world pose.
PointCloud CloudToWorld(const PointCloud& cloud, const NedPose& sensor_pose);
// Back-projects every finite depth cell into a world-frame cloud.
PointCloud DepthToWorldCloud(const DepthGrid& grid, const NedPose& vehicle_pose);

// Writes `<base>.xyz` (one "n e d" line per point) and `<base>.json`
// ({frame_id, stamp_tick, count}).
void WriteCloud(const std::filesystem::path& base, const PointCloud& world_cloud);
// Reads the `<base>.xyz` file back.
std::vector<Vec3> ReadCloudPoints(const std::filesystem::path& xyz_path);

}  // namespace agsim::sensors

#endif  // AGSIM_SENSORS_H_
