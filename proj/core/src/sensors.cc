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

#include "agsim/sensors.h"

#include <cmath>
#include <fstream>

#include "agsim/error.h"
#include "fmt/format.h"
#include "nlohmann/json.hpp"

namespace agsim::sensors {

void Validate(const LidarConfig& cfg) {
  if (cfg.channels < 1) throw ValidationError("lidar channels must be >= 1");
  if (cfg.points_per_channel < 1) throw ValidationError("lidar points_per_channel must be >= 1");
  if (!(cfg.max_range > 0.0)) throw ValidationError("lidar max_range must be > 0");
  if (!(cfg.vfov_min_deg < cfg.vfov_max_deg)) throw ValidationError("lidar vfov min must be < max");
  if (!(cfg.hfov_deg > 0.0) || cfg.hfov_deg > 360.0) {
    throw ValidationError("lidar hfov must be in (0, 360]");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ValidationError("lidar noise_sigma must be >= 0");
}

void Validate(const DepthConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) throw ValidationError("depth width/height must be >= 1");
  if (!(cfg.hfov_deg > 0.0) || !(cfg.hfov_deg < 180.0)) {
    throw ValidationError("depth hfov must be in (0, 180)");
  }
  if (!(cfg.max_range > 0.0)) throw ValidationError("depth max_range must be > 0");
}

NedPose SensorPose(const NedPose& vehicle_pose, const RigidTransform& mount) {
  return Compose(RigidTransform::FromPose(vehicle_pose), mount).ToPose();
}

Vec3 LidarBeamDirection(const LidarConfig& cfg, int channel, int index) {
  const double elevation =
      cfg.channels == 1
          ? DegToRad(0.5 * (cfg.vfov_min_deg + cfg.vfov_max_deg))
          : DegToRad(cfg.vfov_min_deg +
                     (cfg.vfov_max_deg - cfg.vfov_min_deg) * channel / (cfg.channels - 1));
  double azimuth_deg;
  if (cfg.hfov_deg >= 360.0) {
    azimuth_deg = -180.0 + 360.0 * index / cfg.points_per_channel;
  } else if (cfg.points_per_channel == 1) {
    azimuth_deg = 0.0;
  } else {
    azimuth_deg = -0.5 * cfg.hfov_deg + cfg.hfov_deg * index / (cfg.points_per_channel - 1);
  }
  const double azimuth = DegToRad(azimuth_deg);
  // Elevation is up-positive; body z points down.
  return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
          -std::sin(elevation)};
}

Vec3 DepthPixelDirection(int width, int height, double hfov_deg, int row, int col) {
  const double focal = 0.5 * width / std::tan(0.5 * DegToRad(hfov_deg));
  const Vec3 dir{1.0, (col + 0.5 - 0.5 * width) / focal, (row + 0.5 - 0.5 * height) / focal};
  return dir.Normalized();
}

PointCloud LidarScan(const world::Scene& scene, const NedPose& vehicle_pose,
                     const LidarConfig& cfg, Rng* rng, std::string frame_id, SimTime stamp) {
  PointCloud cloud{std::move(frame_id), stamp, {}};
  const NedPose sensor = SensorPose(vehicle_pose, cfg.mount);
  cloud.points.reserve(static_cast<std::size_t>(cfg.channels) * cfg.points_per_channel / 2);
  for (int ch = 0; ch < cfg.channels; ++ch) {
    for (int k = 0; k < cfg.points_per_channel; ++k) {
      const Vec3 dir_sensor = LidarBeamDirection(cfg, ch, k);
      const Ray ray{sensor.position, sensor.orientation.Rotate(dir_sensor)};
      const auto hit = scene.CastRay(ray, cfg.max_range);
      if (!hit) continue;
      double range = hit->distance;
      if (cfg.noise_sigma > 0.0) range = std::max(0.0, range + cfg.noise_sigma * rng->Normal());
      cloud.points.push_back(dir_sensor * range);
    }
  }
  return cloud;
}

DepthGrid CaptureDepth(const world::Scene& scene, const NedPose& vehicle_pose,
                       const DepthConfig& cfg, SimTime stamp) {
  DepthGrid grid{stamp, cfg.width, cfg.height, cfg.hfov_deg, cfg.max_range, {}, cfg.mount};
  grid.ranges.resize(static_cast<std::size_t>(cfg.width) * cfg.height, kNoReturn);
  const NedPose sensor = SensorPose(vehicle_pose, cfg.mount);
  for (int r = 0; r < cfg.height; ++r) {
    for (int c = 0; c < cfg.width; ++c) {
      const Vec3 dir = DepthPixelDirection(cfg.width, cfg.height, cfg.hfov_deg, r, c);
      const auto hit = scene.CastRay({sensor.position, sensor.orientation.Rotate(dir)}, cfg.max_range);
      if (hit && hit->distance > 0.0) {
        grid.ranges[static_cast<std::size_t>(r) * cfg.width + c] = hit->distance;
      }
    }
  }
  return grid;
}

PointCloud CloudToWorld(const PointCloud& cloud, const NedPose& sensor_pose) {
  PointCloud out{"world", cloud.stamp, {}};
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points) out.points.push_back(BodyToNed(sensor_pose, p));
  return out;
}

PointCloud DepthToWorldCloud(const DepthGrid& grid, const NedPose& vehicle_pose) {
  PointCloud out{"world", grid.stamp, {}};
  const NedPose sensor = SensorPose(vehicle_pose, grid.mount);
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      const double range = grid.At(r, c);
      if (!std::isfinite(range)) continue;
      const Vec3 dir = DepthPixelDirection(grid.width, grid.height, grid.hfov_deg, r, c);
      out.points.push_back(BodyToNed(sensor, dir * range));
    }
  }
  return out;
}

void WriteCloud(const std::filesystem::path& base, const PointCloud& world_cloud) {
  std::filesystem::path xyz = base;
  xyz += ".xyz";
  std::ofstream out(xyz);
  if (!out) throw Error("cannot write cloud file '" + xyz.string() + "'");
  std::string buffer;
  for (const auto& p : world_cloud.points) {
    fmt::format_to(std::back_inserter(buffer), "{:.6f} {:.6f} {:.6f}\n", p.n, p.e, p.d);
  }
  out << buffer;

  std::filesystem::path sidecar = base;
  sidecar += ".json";
  std::ofstream meta(sidecar);
  const nlohmann::json header = {{"frame_id", world_cloud.frame_id},
                                 {"stamp_tick", world_cloud.stamp.tick},
                                 {"count", world_cloud.points.size()}};
  meta << header.dump(2) << "\n";
}

std::vector<Vec3> ReadCloudPoints(const std::filesystem::path& xyz_path) {
  std::ifstream in(xyz_path);
  if (!in) throw MissingArtifact("cannot read cloud file '" + xyz_path.string() + "'");
  std::vector<Vec3> points;
  Vec3 p;
  while (in >> p.n >> p.e >> p.d) points.push_back(p);
  return points;
}

}  // namespace agsim::sensors
