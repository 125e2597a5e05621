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

#ifndef AGSIM_WORLD_H_
#define AGSIM_WORLD_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agsim/geometry.h"

namespace agsim::world {

enum class ObstacleTag { kBuilding, kBridgeDeck, kBridgePier, kGeneric };

std::string_view TagName(ObstacleTag tag);
std::optional<ObstacleTag> ParseTag(std::string_view name);

struct Obstacle {
  std::string id;
  Vec3 box_min;
  Vec3 box_max;
  ObstacleTag tag = ObstacleTag::kGeneric;

  bool FootprintContains(double n, double e) const {
    return n >= box_min.n && n <= box_max.n && e >= box_min.e && e <= box_max.e;
  }
  // Top face in NED is the smallest d.
  double TopD() const { return box_min.d; }
};

inline constexpr std::string_view kGroundId = "ground";

struct RayHit {
  double distance = 0.0;
  std::string_view obstacle_id;  // kGroundId for the ground plane
  int obstacle_index = -1;       // -1 for the ground plane
};

// Flat ground plus axis-aligned box obstacles. Immutable after construction;
// the constructor validates invariants and builds a BVH for ray queries.
class Scene {
 public:
  Scene() = default;
  // Throws ValidationError naming the offending obstacle id.
  Scene(double ground_d, const Vec3& bounds_min, const Vec3& bounds_max,
        std::vector<Obstacle> obstacles);

  double ground_d() const { return ground_d_; }
  const Vec3& bounds_min() const { return bounds_min_; }
  const Vec3& bounds_max() const { return bounds_max_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const Obstacle* Find(std::string_view id) const;
  bool ContainsHorizontal(double n, double e) const {
    return n >= bounds_min_.n && n <= bounds_max_.n && e >= bounds_min_.e && e <= bounds_max_.e;
  }

  // Nearest hit among the ground plane and all obstacles within max_range.
  // Equal distances resolve to the lowest obstacle index, then ground.
  std::optional<RayHit> CastRay(const Ray& ray, double max_range) const;
  // Same, ignoring the ground plane.
  std::optional<RayHit> CastRayObstacles(const Ray& ray, double max_range) const;

 private:
  struct BvhNode {
    Vec3 box_min;
    Vec3 box_max;
    int left = -1;  // child indices; -1 for leaves
    int right = -1;
    int first = 0;  // leaf range into leaf_order_
    int count = 0;
  };

  int BuildBvh(int first, int count);
  void QueryObstacles(const Ray& ray, double max_range, RayHit& best, bool& found) const;

  double ground_d_ = 0.0;
  Vec3 bounds_min_{-100.0, -100.0, -100.0};
  Vec3 bounds_max_{100.0, 100.0, 0.0};
  std::vector<Obstacle> obstacles_;
  std::vector<int> leaf_order_;
  std::vector<BvhNode> nodes_;
};

// Parses the scene schema: {ground_d?, bounds: [[n,e,d],[n,e,d]], obstacles?:
// [{id, min, max, tag}]}. Unknown fields are rejected.
// Throws ParseError, SchemaError, ValidationError.
Scene ParseScene(std::string_view json_text);
Scene LoadScene(const std::filesystem::path& path);
std::string SceneToJsonText(const Scene& scene);

std::optional<RayHit> CastRay(const Scene& scene, const Ray& ray, double max_range);

// True iff no obstacle occupies the band [ground_d - clearance_d, ground_d]
// at (n, e). Bridge decks never block: they are drivable surfaces.
// Throws OutOfBounds.
bool IsTraversable(const Scene& scene, double n, double e, double clearance_d);

// Level-aware generalization used by the car model: true iff no obstacle
// other than the supporting surface intersects the open band
// (support_d - clearance_d, support_d) above (n, e).
bool IsClearAt(const Scene& scene, double n, double e, double support_d, double clearance_d);

// Down coordinate of the highest drivable surface (ground or bridge deck top)
// at (n, e) that a vehicle currently at current_d can reach by climbing at
// most max_step.
double SupportSurfaceD(const Scene& scene, double n, double e, double current_d, double max_step);

// True iff the closed segment a-b touches no obstacle. Symmetric in a, b.
bool LineOfSight(const Scene& scene, const Vec3& a, const Vec3& b);

// True iff p lies on the boundary of a bridge-deck structure within tol.
bool OnDrivableStructure(const Scene& scene, const Vec3& p, double tol);

}  // namespace agsim::world

#endif  // AGSIM_WORLD_H_
