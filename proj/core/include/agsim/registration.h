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

#ifndef AGSIM_REGISTRATION_H_
#define AGSIM_REGISTRATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/sensors.h"

namespace agsim::registration {

struct IcpParams {
  int max_iterations = 50;
  double correspondence_max_dist = 2.0;
  double convergence_eps = 1e-6;  // on the change in RMSE (m)
  int min_pairs = 10;
};

void Validate(const IcpParams& params);

struct IcpResult {
  RigidTransform transform;  // maps source onto target
  double rmse = 0.0;
  int iterations = 0;
  int pairs_used = 0;
  bool converged = false;
  // RMSE measured at the start of every iteration, before its update.
  std::vector<double> rmse_history;
};

// Closed-form least-squares rigid alignment of paired points (Kabsch): the
// rotation is the orthogonal polar factor of the cross-covariance with its
// determinant forced to +1. Throws DegenerateInput for fewer than 3 pairs or
// collinear sources.
RigidTransform BestFitTransform(std::span<const Vec3> source, std::span<const Vec3> target);

// Exact fixed-radius nearest neighbor over a uniform voxel hash. Cells are half
// the query radius; shells are searched outward until no closer point can
// remain. Ties go to the lowest point index.
class NearestNeighborIndex {
 public:
  struct Match {
    int index = -1;
    double squared_distance = 0.0;
  };

  NearestNeighborIndex(std::span<const Vec3> points, double radius);

  std::optional<Match> Nearest(const Vec3& query) const;
  double radius() const { return radius_; }

 private:
  struct Key {
    std::int64_t i, j, k;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& key) const;
  };
  Key KeyOf(const Vec3& p) const;

  std::span<const Vec3> points_;
  double radius_;
  double cell_;
  int shells_;
  std::unordered_map<Key, std::vector<int>, KeyHash> cells_;
};

// Point-to-point ICP estimating the transform that maps `source` onto
// `target`. Throws InsufficientCorrespondences when an iteration finds fewer
// than min_pairs correspondences.
IcpResult Icp(std::span<const Vec3> source, std::span<const Vec3> target,
              const RigidTransform& init, const IcpParams& params);
IcpResult Icp(const sensors::PointCloud& source, const sensors::PointCloud& target,
              const RigidTransform& init, const IcpParams& params);

// RMS nearest-neighbor distance of T(source) to target over pairs within
// max_dist. Throws NoPairs.
double CloudRmse(std::span<const Vec3> source, std::span<const Vec3> target,
                 const RigidTransform& t, double max_dist);

// One representative (centroid) per occupied voxel, ordered by voxel key.
std::vector<Vec3> VoxelDownsample(std::span<const Vec3> points, double voxel);

}  // namespace agsim::registration

#endif  // AGSIM_REGISTRATION_H_
