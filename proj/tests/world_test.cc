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

#include <cmath>
#include <string>

#include "agsim/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim::world {
namespace {

using testing::RandomVector;

Scene LoadBridgeTown() { return LoadScene(testing::ScenePath("bridge_town.json")); }

TEST(ParseSceneTest, GroundOnly) {
  const Scene scene = ParseScene(R"({"bounds": [[-10, -10, -10], [10, 10, 0]]})");
  EXPECT_TRUE(scene.obstacles().empty());
  EXPECT_DOUBLE_EQ(scene.ground_d(), 0.0);
}

TEST(ParseSceneTest, DuplicateIdNamesTheId) {
  const std::string text = R"({
    "bounds": [[-10, -10, -10], [10, 10, 0]],
    "obstacles": [
      {"id": "tower", "min": [0, 0, -2], "max": [1, 1, 0], "tag": "building"},
      {"id": "tower", "min": [3, 3, -2], "max": [4, 4, 0], "tag": "building"}]})";
  try {
    ParseScene(text);
    FAIL() << "duplicate id accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("tower"), std::string::npos) << e.what();
  }
}

TEST(ParseSceneTest, RejectsBadInput) {
  EXPECT_THROW(ParseScene("{not json"), ParseError);
  EXPECT_THROW(ParseScene(R"({"bounds": [[-10, -10, -10], [10, 10, 0]], "extra": 1})"), SchemaError);
  EXPECT_THROW(ParseScene(R"({"obstacles": []})"), SchemaError);
  EXPECT_THROW(ParseScene(R"({"bounds": [[-10, -10, -10], [10, 10, 0]],
      "obstacles": [{"id": "a", "min": [2, 0, -1], "max": [1, 1, 0], "tag": "building"}]})"),
               ValidationError);
  EXPECT_THROW(ParseScene(R"({"bounds": [[-10, -10, -10], [10, 10, 0]],
      "obstacles": [{"id": "a", "min": [0, 0, -1], "max": [1, 1, 0], "tag": "castle"}]})"),
               SchemaError);
}

TEST(ParseSceneTest, SerializationRoundTrip) {
  const Scene scene = LoadBridgeTown();
  const Scene again = ParseScene(SceneToJsonText(scene));
  ASSERT_EQ(again.obstacles().size(), scene.obstacles().size());
  for (std::size_t i = 0; i < scene.obstacles().size(); ++i) {
    EXPECT_EQ(again.obstacles()[i].id, scene.obstacles()[i].id);
    EXPECT_EQ(again.obstacles()[i].box_min, scene.obstacles()[i].box_min);
    EXPECT_EQ(again.obstacles()[i].box_max, scene.obstacles()[i].box_max);
    EXPECT_EQ(again.obstacles()[i].tag, scene.obstacles()[i].tag);
  }
}

TEST(BridgeTownTest, HasDeckAndPiers) {
  const Scene scene = LoadBridgeTown();
  int decks = 0;
  int piers = 0;
  for (const Obstacle& o : scene.obstacles()) {
    decks += o.tag == ObstacleTag::kBridgeDeck;
    piers += o.tag == ObstacleTag::kBridgePier;
  }
  EXPECT_GE(decks, 1);
  EXPECT_GE(piers, 2);
}

TEST(CastRayTest, StraightDownHitsGround) {
  const auto scene = testing::OpenScene();
  const auto hit = CastRay(*scene, Ray::Through({0, 0, -10}, {0, 0, 1}), 100.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(hit->distance, 10.0);
  EXPECT_EQ(hit->obstacle_id, kGroundId);
  EXPECT_EQ(hit->obstacle_index, -1);
}

TEST(CastRayTest, ParallelAboveEverythingMisses) {
  const Scene scene = testing::BoxScene({5, -1, -2}, {7, 1, 0});
  EXPECT_FALSE(CastRay(scene, Ray::Through({0, 0, -5}, {1, 0, 0}), 1000.0).has_value());
}

TEST(CastRayTest, HitsBoxLikeSlabTest) {
  const Scene scene = testing::BoxScene({5, -1, -2}, {7, 1, 0});
  const auto hit = CastRay(scene, Ray::Through({0, 0, -1}, {1, 0, 0}), 100.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(hit->distance, 5.0);
  EXPECT_EQ(hit->obstacle_id, "box");
  EXPECT_FALSE(CastRay(scene, Ray::Through({0, 0, -1}, {1, 0, 0}), 4.9).has_value());
}

// Brute force over every obstacle and the ground plane.
std::optional<double> BruteForceDistance(const Scene& scene, const Ray& ray, double max_range) {
  std::optional<double> best;
  for (const Obstacle& o : scene.obstacles()) {
    const auto t = RayAabb(ray, o.box_min, o.box_max);
    if (t && *t <= max_range && (!best || *t < *best)) best = t;
  }
  if (ray.direction.d > 0.0) {
    const double t = (scene.ground_d() - ray.origin.d) / ray.direction.d;
    if (t >= 0.0 && t <= max_range && (!best || t < *best)) best = t;
  }
  return best;
}

TEST(CastRayTest, BvhMatchesBruteForce) {
  const Scene scene = LoadBridgeTown();
  Rng rng(31);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 origin{rng.Uniform(0, 300), rng.Uniform(0, 500), rng.Uniform(-40, -0.5)};
    const Ray ray = Ray::Through(origin, RandomVector(rng, 1.0));
    const auto expected = BruteForceDistance(scene, ray, 150.0);
    const auto actual = CastRay(scene, ray, 150.0);
    ASSERT_EQ(actual.has_value(), expected.has_value()) << "ray " << i;
    if (actual) {
      ++hits;
      EXPECT_NEAR(actual->distance, *expected, 1e-9);
    }
  }
  EXPECT_GT(hits, 1000);
}

// Property: a hit found within range r is found identically with r' > r, and
// a miss at r' is a miss at r.
TEST(CastRayTest, MonotoneInMaxRange) {
  const Scene scene = LoadBridgeTown();
  Rng rng(37);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 origin{rng.Uniform(0, 300), rng.Uniform(0, 500), rng.Uniform(-30, -0.5)};
    const Ray ray = Ray::Through(origin, RandomVector(rng, 1.0));
    const double r = rng.Uniform(1, 60);
    const auto near = CastRay(scene, ray, r);
    const auto far = CastRay(scene, ray, r * 2.0);
    if (near) {
      ASSERT_TRUE(far.has_value());
      EXPECT_EQ(near->distance, far->distance);
      EXPECT_EQ(near->obstacle_id, far->obstacle_id);
    }
    if (!far) EXPECT_FALSE(near.has_value());
  }
}

TEST(TraversableTest, OpenBuildingAndUnderBridge) {
  const Scene scene = LoadBridgeTown();
  EXPECT_TRUE(IsTraversable(scene, 10.0, 10.0, 2.0));
  EXPECT_FALSE(IsTraversable(scene, 30.0, 70.0, 2.0));   // inside b1
  EXPECT_TRUE(IsTraversable(scene, 57.0, 60.0, 2.0));    // under the overpass deck
  EXPECT_FALSE(IsTraversable(scene, 57.0, 22.0, 2.0));   // overpass pier
  EXPECT_THROW(IsTraversable(scene, -5.0, 10.0, 2.0), OutOfBounds);
}

TEST(TraversableTest, LowArchBlocksTallVehicle) {
  const Scene scene = testing::BoxScene({0, 0, -3}, {10, 10, -2.5}, ObstacleTag::kGeneric);
  EXPECT_TRUE(IsTraversable(scene, 5, 5, 2.0));
  EXPECT_FALSE(IsTraversable(scene, 5, 5, 2.8));
}

TEST(SupportSurfaceTest, ClimbsRampSteps) {
  const Scene scene = LoadBridgeTown();
  // First ramp step is 0.3 m tall; a car on the ground can mount it.
  EXPECT_DOUBLE_EQ(SupportSurfaceD(scene, 82.0, 44.0, 0.0, 0.35), -0.3);
  // The deck 6 m up is out of reach from the ground.
  EXPECT_DOUBLE_EQ(SupportSurfaceD(scene, 57.0, 60.0, 0.0, 0.35), 0.0);
  // Already on the deck, it stays there.
  EXPECT_DOUBLE_EQ(SupportSurfaceD(scene, 57.0, 60.0, -6.0, 0.35), -6.0);
}

TEST(LineOfSightTest, DeckOccludesFromAbove) {
  const Scene scene = LoadBridgeTown();
  const Vec3 under{57.0, 60.0, -0.5};
  EXPECT_FALSE(LineOfSight(scene, {57.0, 60.0, -10.0}, under));
  EXPECT_TRUE(LineOfSight(scene, {57.0, 52.0, -1.5}, under));
}

// Property: the segment test is symmetric.
TEST(LineOfSightTest, Symmetric) {
  const Scene scene = LoadBridgeTown();
  Rng rng(41);
  int blocked = 0;
  for (int i = 0; i < 3000; ++i) {
    const Vec3 a{rng.Uniform(0, 300), rng.Uniform(0, 500), rng.Uniform(-30, 0)};
    const Vec3 b = a + RandomVector(rng, 80.0);
    const bool ab = LineOfSight(scene, a, b);
    EXPECT_EQ(ab, LineOfSight(scene, b, a));
    blocked += !ab;
  }
  EXPECT_GT(blocked, 100);
}

}  // namespace
}  // namespace agsim::world
