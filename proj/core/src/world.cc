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

#include "agsim/world.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "agsim/error.h"
#include "json_util.h"

namespace agsim::world {
namespace {

using internal::json;

constexpr int kLeafSize = 2;

// Parametric overlap of segment a + t (b - a), t in [0, 1], with a box.
bool SegmentTouchesBox(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi) {
  const double start[3] = {a.n, a.e, a.d};
  const double delta[3] = {b.n - a.n, b.e - a.e, b.d - a.d};
  const double box_lo[3] = {lo.n, lo.e, lo.d};
  const double box_hi[3] = {hi.n, hi.e, hi.d};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (delta[axis] == 0.0) {
      if (start[axis] < box_lo[axis] || start[axis] > box_hi[axis]) return false;
      continue;
    }
    double enter = (box_lo[axis] - start[axis]) / delta[axis];
    double exit = (box_hi[axis] - start[axis]) / delta[axis];
    if (enter > exit) std::swap(enter, exit);
    t0 = std::max(t0, enter);
    t1 = std::min(t1, exit);
    if (t0 > t1) return false;
  }
  return true;
}

bool BetterHit(double distance, int index, const RayHit& best, bool found) {
  if (!found) return true;
  if (distance < best.distance) return true;
  return distance == best.distance && index < best.obstacle_index;
}

}  // namespace

std::string_view TagName(ObstacleTag tag) {
  switch (tag) {
    case ObstacleTag::kBuilding:
      return "building";
    case ObstacleTag::kBridgeDeck:
      return "bridge_deck";
    case ObstacleTag::kBridgePier:
      return "bridge_pier";
    case ObstacleTag::kGeneric:
      return "generic";
  }
  return "generic";
}

std::optional<ObstacleTag> ParseTag(std::string_view name) {
  for (const auto tag : {ObstacleTag::kBuilding, ObstacleTag::kBridgeDeck,
                         ObstacleTag::kBridgePier, ObstacleTag::kGeneric}) {
    if (TagName(tag) == name) return tag;
  }
  return std::nullopt;
}

Scene::Scene(double ground_d, const Vec3& bounds_min, const Vec3& bounds_max,
             std::vector<Obstacle> obstacles)
    : ground_d_(ground_d),
      bounds_min_(bounds_min),
      bounds_max_(bounds_max),
      obstacles_(std::move(obstacles)) {
  if (!std::isfinite(ground_d_) || !bounds_min_.IsFinite() || !bounds_max_.IsFinite()) {
    throw ValidationError("scene ground_d and bounds must be finite");
  }
  if (bounds_min_.n > bounds_max_.n || bounds_min_.e > bounds_max_.e ||
      bounds_min_.d > bounds_max_.d) {
    throw ValidationError("scene bounds min must be <= max componentwise");
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& ob : obstacles_) {
    if (ob.id.empty()) throw ValidationError("obstacle with empty id");
    if (!ids.insert(ob.id).second) throw ValidationError("duplicate obstacle id '" + ob.id + "'");
    if (!ob.box_min.IsFinite() || !ob.box_max.IsFinite()) {
      throw ValidationError("obstacle '" + ob.id + "' has non-finite corners");
    }
    if (ob.box_min.n > ob.box_max.n || ob.box_min.e > ob.box_max.e ||
        ob.box_min.d > ob.box_max.d) {
      throw ValidationError("obstacle '" + ob.id + "' has min > max");
    }
    if (ob.box_min.n < bounds_min_.n || ob.box_min.e < bounds_min_.e ||
        ob.box_min.d < bounds_min_.d || ob.box_max.n > bounds_max_.n ||
        ob.box_max.e > bounds_max_.e || ob.box_max.d > bounds_max_.d) {
      throw ValidationError("obstacle '" + ob.id + "' lies outside the scene bounds");
    }
  }
  leaf_order_.resize(obstacles_.size());
  std::iota(leaf_order_.begin(), leaf_order_.end(), 0);
  if (!obstacles_.empty()) {
    nodes_.reserve(2 * obstacles_.size());
    BuildBvh(0, static_cast<int>(obstacles_.size()));
  }
}

int Scene::BuildBvh(int first, int count) {
  BvhNode node;
  node.box_min = obstacles_[leaf_order_[first]].box_min;
  node.box_max = obstacles_[leaf_order_[first]].box_max;
  for (int i = first; i < first + count; ++i) {
    const auto& ob = obstacles_[leaf_order_[i]];
    node.box_min = {std::min(node.box_min.n, ob.box_min.n), std::min(node.box_min.e, ob.box_min.e),
                    std::min(node.box_min.d, ob.box_min.d)};
    node.box_max = {std::max(node.box_max.n, ob.box_max.n), std::max(node.box_max.e, ob.box_max.e),
                    std::max(node.box_max.d, ob.box_max.d)};
  }
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  const Vec3 extent = node.box_max - node.box_min;
  const int axis = extent.n >= extent.e && extent.n >= extent.d ? 0 : (extent.e >= extent.d ? 1 : 2);
  auto center = [&](int ob_index) {
    const auto& ob = obstacles_[ob_index];
    const Vec3 c = (ob.box_min + ob.box_max) * 0.5;
    return axis == 0 ? c.n : (axis == 1 ? c.e : c.d);
  };
  const auto begin = leaf_order_.begin() + first;
  std::nth_element(begin, begin + count / 2, begin + count, [&](int a, int b) {
    const double ca = center(a), cb = center(b);
    return ca < cb || (ca == cb && a < b);
  });
  const int left = BuildBvh(first, count / 2);
  const int right = BuildBvh(first + count / 2, count - count / 2);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

void Scene::QueryObstacles(const Ray& ray, double max_range, RayHit& best, bool& found) const {
  if (nodes_.empty()) return;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = nodes_[stack[--top]];
    const auto enter = RayAabb(ray, node.box_min, node.box_max);
    if (!enter || *enter > max_range || (found && *enter > best.distance)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int ob_index = leaf_order_[i];
        const auto& ob = obstacles_[ob_index];
        const auto hit = RayAabb(ray, ob.box_min, ob.box_max);
        if (hit && *hit <= max_range && BetterHit(*hit, ob_index, best, found)) {
          best = {*hit, ob.id, ob_index};
          found = true;
        }
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
}

std::optional<RayHit> Scene::CastRayObstacles(const Ray& ray, double max_range) const {
  RayHit best;
  bool found = false;
  QueryObstacles(ray, max_range, best, found);
  if (!found) return std::nullopt;
  return best;
}

std::optional<RayHit> Scene::CastRay(const Ray& ray, double max_range) const {
  RayHit best;
  bool found = false;
  QueryObstacles(ray, max_range, best, found);
  if (ray.direction.d > 0.0) {
    const double t = std::max(0.0, (ground_d_ - ray.origin.d) / ray.direction.d);
    if (t <= max_range && (!found || t < best.distance)) {
      best = {t, kGroundId, -1};
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

const Obstacle* Scene::Find(std::string_view id) const {
  for (const auto& ob : obstacles_) {
    if (ob.id == id) return &ob;
  }
  return nullptr;
}

Scene ParseScene(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene is not valid JSON: ") + e.what());
  }
  internal::RequireObject<SchemaError>(root, "scene");
  internal::RejectUnknownFields<SchemaError>(root, {"ground_d", "bounds", "obstacles"}, "");
  const double ground_d = internal::NumberOr<SchemaError>(root, "ground_d", 0.0, "");
  const json& bounds = internal::RequireField<SchemaError>(root, "bounds", "");
  if (!bounds.is_array() || bounds.size() != 2) {
    throw SchemaError("field 'bounds' must be [[n,e,d],[n,e,d]]");
  }
  const Vec3 bmin = internal::AsVec3<SchemaError>(bounds[0], "bounds[0]");
  const Vec3 bmax = internal::AsVec3<SchemaError>(bounds[1], "bounds[1]");

  std::vector<Obstacle> obstacles;
  if (const auto it = root.find("obstacles"); it != root.end()) {
    if (!it->is_array()) throw SchemaError("field 'obstacles' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& item = (*it)[i];
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      internal::RequireObject<SchemaError>(item, where);
      internal::RejectUnknownFields<SchemaError>(item, {"id", "min", "max", "tag"}, where);
      Obstacle ob;
      ob.id = internal::AsString<SchemaError>(internal::RequireField<SchemaError>(item, "id", where),
                                              where + ".id");
      ob.box_min = internal::AsVec3<SchemaError>(
          internal::RequireField<SchemaError>(item, "min", where), where + ".min");
      ob.box_max = internal::AsVec3<SchemaError>(
          internal::RequireField<SchemaError>(item, "max", where), where + ".max");
      const std::string tag = internal::AsString<SchemaError>(
          internal::RequireField<SchemaError>(item, "tag", where), where + ".tag");
      const auto parsed = ParseTag(tag);
      if (!parsed) throw SchemaError("field '" + where + ".tag' has unknown value '" + tag + "'");
      ob.tag = *parsed;
      obstacles.push_back(std::move(ob));
    }
  }
  return Scene(ground_d, bmin, bmax, std::move(obstacles));
}

Scene LoadScene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseScene(buffer.str());
}

std::string SceneToJsonText(const Scene& scene) {
  json root;
  root["ground_d"] = scene.ground_d();
  root["bounds"] = json::array(
      {internal::Vec3Json(scene.bounds_min()), internal::Vec3Json(scene.bounds_max())});
  root["obstacles"] = json::array();
  for (const auto& ob : scene.obstacles()) {
    root["obstacles"].push_back({{"id", ob.id},
                                 {"min", internal::Vec3Json(ob.box_min)},
                                 {"max", internal::Vec3Json(ob.box_max)},
                                 {"tag", std::string(TagName(ob.tag))}});
  }
  return root.dump(2);
}

std::optional<RayHit> CastRay(const Scene& scene, const Ray& ray, double max_range) {
  return scene.CastRay(ray, max_range);
}

bool IsTraversable(const Scene& scene, double n, double e, double clearance_d) {
  if (!scene.ContainsHorizontal(n, e)) {
    throw OutOfBounds("position (" + std::to_string(n) + ", " + std::to_string(e) +
                      ") is outside the scene bounds");
  }
  const double band_top = scene.ground_d() - clearance_d;
  const double band_bottom = scene.ground_d();
  for (const auto& ob : scene.obstacles()) {
    if (ob.tag == ObstacleTag::kBridgeDeck || !ob.FootprintContains(n, e)) continue;
    if (ob.box_min.d <= band_bottom && ob.box_max.d >= band_top) return false;
  }
  return true;
}

bool IsClearAt(const Scene& scene, double n, double e, double support_d, double clearance_d) {
  constexpr double kContact = 1e-6;
  for (const auto& ob : scene.obstacles()) {
    if (!ob.FootprintContains(n, e)) continue;
    if (ob.box_min.d < support_d - kContact && ob.box_max.d > support_d - clearance_d) {
      return false;
    }
  }
  return true;
}

double SupportSurfaceD(const Scene& scene, double n, double e, double current_d, double max_step) {
  constexpr double kSlack = 1e-9;
  double support = scene.ground_d();
  for (const auto& ob : scene.obstacles()) {
    if (ob.tag != ObstacleTag::kBridgeDeck || !ob.FootprintContains(n, e)) continue;
    const double top = ob.TopD();
    if (top >= current_d - max_step - kSlack && top < support) support = top;
  }
  return support;
}

bool LineOfSight(const Scene& scene, const Vec3& a, const Vec3& b) {
  for (const auto& ob : scene.obstacles()) {
    if (SegmentTouchesBox(a, b, ob.box_min, ob.box_max)) return false;
  }
  return true;
}

bool OnDrivableStructure(const Scene& scene, const Vec3& p, double tol) {
  for (const auto& ob : scene.obstacles()) {
    if (ob.tag != ObstacleTag::kBridgeDeck) continue;
    const bool inside_expanded = p.n >= ob.box_min.n - tol && p.n <= ob.box_max.n + tol &&
                                 p.e >= ob.box_min.e - tol && p.e <= ob.box_max.e + tol &&
                                 p.d >= ob.box_min.d - tol && p.d <= ob.box_max.d + tol;
    if (inside_expanded) return true;
  }
  return false;
}

}  // namespace agsim::world
