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

#include "agsim/registration.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "agsim/error.h"

namespace agsim::registration {
namespace {

Eigen::Vector3d ToEigen(const Vec3& v) { return {v.n, v.e, v.d}; }

struct Correspondences {
  std::vector<Vec3> source;  // already transformed
  std::vector<Vec3> target;
  double sum_squared = 0.0;

  double Rmse() const { return std::sqrt(sum_squared / static_cast<double>(source.size())); }
};

Correspondences Match(std::span<const Vec3> source, std::span<const Vec3> target,
                      const NearestNeighborIndex& index, const RigidTransform& t) {
  Correspondences out;
  out.source.reserve(source.size());
  out.target.reserve(source.size());
  for (const auto& s : source) {
    const Vec3 moved = ApplyTransform(t, s);
    if (const auto match = index.Nearest(moved)) {
      out.source.push_back(moved);
      out.target.push_back(target[match->index]);
      out.sum_squared += match->squared_distance;
    }
  }
  return out;
}

}  // namespace

void Validate(const IcpParams& params) {
  if (params.max_iterations < 1 || params.min_pairs < 1 || !(params.correspondence_max_dist > 0.0) ||
      !(params.convergence_eps > 0.0)) {
    throw ValidationError("ICP parameters must all be positive");
  }
}

RigidTransform BestFitTransform(std::span<const Vec3> source, std::span<const Vec3> target) {
  if (source.size() != target.size()) {
    throw DegenerateInput("best-fit transform needs equally sized point sets");
  }
  if (source.size() < 3) throw DegenerateInput("best-fit transform needs at least 3 pairs");

  Eigen::Vector3d source_centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d target_centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    source_centroid += ToEigen(source[i]);
    target_centroid += ToEigen(target[i]);
  }
  source_centroid /= static_cast<double>(source.size());
  target_centroid /= static_cast<double>(target.size());

  Eigen::Matrix3d cross_cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    cross_cov += (ToEigen(source[i]) - source_centroid) *
                 (ToEigen(target[i]) - target_centroid).transpose();
  }

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  // Rank < 2 leaves the rotation about the remaining axis undetermined.
  if (!(sigma(0) > 0.0) || sigma(1) <= 1e-12 * sigma(0)) {
    throw DegenerateInput("best-fit transform input is collinear or coincident");
  }
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
  // Reflection fix: flip the direction of the smallest singular value.
  if ((v * u.transpose()).determinant() < 0.0) correction(2, 2) = -1.0;
  const Eigen::Matrix3d rotation = v * correction * u.transpose();
  const Eigen::Vector3d translation = target_centroid - rotation * source_centroid;

  const Eigen::Quaterniond q(rotation);
  RigidTransform out;
  out.rotation = Quaternion{q.w(), q.x(), q.y(), q.z()}.Normalized();
  out.translation = {translation(0), translation(1), translation(2)};
  return out;
}

std::size_t NearestNeighborIndex::KeyHash::operator()(const Key& key) const {
  std::uint64_t h = static_cast<std::uint64_t>(key.i) * 0x9e3779b97f4a7c15ULL;
  h ^= static_cast<std::uint64_t>(key.j) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(key.k) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points, double radius)
    : points_(points), radius_(radius) {
  // Unbounded radius degenerates to a single cell (brute force).
  cell_ = std::isfinite(radius) ? radius / 2.0 : std::numeric_limits<double>::max();
  shells_ = std::isfinite(radius) ? 2 : 1;
  cells_.reserve(points.size());
  for (int i = 0; i < static_cast<int>(points.size()); ++i) cells_[KeyOf(points[i])].push_back(i);
}

NearestNeighborIndex::Key NearestNeighborIndex::KeyOf(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.n / cell_)),
          static_cast<std::int64_t>(std::floor(p.e / cell_)),
          static_cast<std::int64_t>(std::floor(p.d / cell_))};
}

std::optional<NearestNeighborIndex::Match> NearestNeighborIndex::Nearest(const Vec3& query) const {
  const Key center = KeyOf(query);
  const double limit = radius_ * radius_;
  Match best;
  auto scan = [&](const Key& key) {
    const auto it = cells_.find(key);
    if (it == cells_.end()) return;
    for (const int index : it->second) {
      const double d2 = (points_[index] - query).SquaredNorm();
      if (d2 > limit) continue;
      if (best.index < 0 || d2 < best.squared_distance ||
          (d2 == best.squared_distance && index < best.index)) {
        best = {index, d2};
      }
    }
  };
  for (std::int64_t s = 0; s <= shells_; ++s) {
    // Cells at Chebyshev offset exactly s.
    for (std::int64_t di = -s; di <= s; ++di) {
      for (std::int64_t dj = -s; dj <= s; ++dj) {
        const bool face = std::abs(di) == s || std::abs(dj) == s;
        for (std::int64_t dk = -s; dk <= s; dk += (face ? 1 : std::max<std::int64_t>(1, 2 * s))) {
          scan({center.i + di, center.j + dj, center.k + dk});
        }
      }
    }
    // Anything in shell s + 1 is at least s cells away.
    const double reach = static_cast<double>(s) * cell_;
    if (best.index >= 0 && best.squared_distance < reach * reach) break;
  }
  if (best.index < 0) return std::nullopt;
  return best;
}

IcpResult Icp(std::span<const Vec3> source, std::span<const Vec3> target,
              const RigidTransform& init, const IcpParams& params) {
  Validate(params);
  if (static_cast<int>(target.size()) < params.min_pairs) {
    throw InsufficientCorrespondences("target cloud has fewer than min_pairs points");
  }
  const NearestNeighborIndex index(target, params.correspondence_max_dist);

  IcpResult result;
  result.transform = init;
  double previous_rmse = std::numeric_limits<double>::infinity();
  Correspondences pairs;
  bool evaluated_at_final = false;
  for (int it = 0; it < params.max_iterations; ++it) {
    pairs = Match(source, target, index, result.transform);
    if (static_cast<int>(pairs.source.size()) < params.min_pairs) {
      throw InsufficientCorrespondences("ICP iteration " + std::to_string(it + 1) + " found " +
                                        std::to_string(pairs.source.size()) + " pairs");
    }
    const double rmse = pairs.Rmse();
    result.rmse_history.push_back(rmse);
    result.iterations = it + 1;
    if (std::abs(previous_rmse - rmse) < params.convergence_eps) {
      result.converged = true;
      evaluated_at_final = true;
      break;
    }
    previous_rmse = rmse;
    const RigidTransform delta = BestFitTransform(pairs.source, pairs.target);
    result.transform = Compose(delta, result.transform);
  }
  if (!evaluated_at_final) {
    pairs = Match(source, target, index, result.transform);
    if (static_cast<int>(pairs.source.size()) < params.min_pairs) {
      throw InsufficientCorrespondences("ICP final evaluation found too few pairs");
    }
  }
  result.rmse = pairs.Rmse();
  result.pairs_used = static_cast<int>(pairs.source.size());
  return result;
}

IcpResult Icp(const sensors::PointCloud& source, const sensors::PointCloud& target,
              const RigidTransform& init, const IcpParams& params) {
  return Icp(std::span<const Vec3>(source.points), std::span<const Vec3>(target.points), init,
             params);
}

double CloudRmse(std::span<const Vec3> source, std::span<const Vec3> target,
                 const RigidTransform& t, double max_dist) {
  if (source.empty() || target.empty()) throw NoPairs("cloud RMSE needs nonempty clouds");
  const NearestNeighborIndex index(target, max_dist);
  const Correspondences pairs = Match(source, target, index, t);
  if (pairs.source.empty()) throw NoPairs("no correspondences within max_dist");
  return pairs.Rmse();
}

std::vector<Vec3> VoxelDownsample(std::span<const Vec3> points, double voxel) {
  struct Accum {
    Vec3 sum;
    int count = 0;
  };
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Accum> cells;
  for (const auto& p : points) {
    auto& cell = cells[{static_cast<std::int64_t>(std::floor(p.n / voxel)),
                        static_cast<std::int64_t>(std::floor(p.e / voxel)),
                        static_cast<std::int64_t>(std::floor(p.d / voxel))}];
    cell.sum += p;
    ++cell.count;
  }
  std::vector<Vec3> out;
  out.reserve(cells.size());
  for (const auto& [key, cell] : cells) out.push_back(cell.sum / static_cast<double>(cell.count));
  return out;
}

}  // namespace agsim::registration
