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

#include "agsim/geometry.h"

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim {
namespace {

using testing::RandomRotation;
using testing::RandomVector;
using testing::Vec3Near;

TEST(WrapAngleTest, IntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(WrapAngle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(WrapAngle(kPi), kPi);
  EXPECT_DOUBLE_EQ(WrapAngle(-kPi), kPi);
  EXPECT_NEAR(WrapAngle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(WrapAngle(-0.5 * kPi - 4.0 * kPi), -0.5 * kPi, 1e-12);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.Uniform(-50.0, 50.0);
    const double w = WrapAngle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::remainder(a - w, 2.0 * kPi), 0.0, 1e-9);
  }
}

TEST(Vec3Test, Arithmetic) {
  const Vec3 a{1, 2, 3};
  const Vec3 b{-4, 0.5, 2};
  EXPECT_EQ(a + b, (Vec3{-3, 2.5, 5}));
  EXPECT_EQ(a - b, (Vec3{5, 1.5, 1}));
  EXPECT_DOUBLE_EQ(a.Dot(b), -4 + 1 + 6);
  EXPECT_EQ((Vec3{1, 0, 0}).Cross({0, 1, 0}), (Vec3{0, 0, 1}));
  EXPECT_DOUBLE_EQ((Vec3{3, 4, 12}).Norm(), 13.0);
  EXPECT_DOUBLE_EQ((Vec3{3, 4, 12}).HorizontalNorm(), 5.0);
  EXPECT_DOUBLE_EQ(HorizontalDistance({1, 1, -50}, {4, 5, 7}), 5.0);
  EXPECT_DOUBLE_EQ((Vec3{0, 0, -7}).Altitude(), 7.0);
  EXPECT_FALSE(std::signbit((Vec3{0, 0, 0}).Altitude()));
}

TEST(QuaternionTest, YawNinetyMapsNorthToEast) {
  const RigidTransform t{Quaternion::FromYaw(DegToRad(90.0)), {}};
  EXPECT_TRUE(Vec3Near(ApplyTransform(t, {1, 0, 0}), {0, 1, 0}, 1e-12));
}

TEST(QuaternionTest, PitchUpRaisesNose) {
  // Positive pitch tilts the forward axis upward (negative d).
  const Quaternion q = Quaternion::FromYawPitchRoll(0.0, DegToRad(30.0), 0.0);
  const Vec3 fwd = q.Rotate({1, 0, 0});
  EXPECT_NEAR(fwd.n, std::cos(DegToRad(30.0)), 1e-12);
  EXPECT_NEAR(fwd.d, -std::sin(DegToRad(30.0)), 1e-12);
}

TEST(QuaternionTest, EulerRoundTrip) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double yaw = rng.Uniform(-3.1, 3.1);
    const double pitch = rng.Uniform(-1.5, 1.5);
    const double roll = rng.Uniform(-3.1, 3.1);
    const Quaternion q = Quaternion::FromYawPitchRoll(yaw, pitch, roll);
    EXPECT_TRUE(q.IsUnit());
    EXPECT_NEAR(WrapAngle(q.Yaw() - yaw), 0.0, 1e-9);
    EXPECT_NEAR(q.Pitch(), pitch, 1e-9);
    EXPECT_NEAR(WrapAngle(q.Roll() - roll), 0.0, 1e-9);
  }
}

TEST(QuaternionTest, AngleOfAxisAngle) {
  EXPECT_NEAR(Quaternion::FromAxisAngle({0, 0, 1}, 0.7).Angle(), 0.7, 1e-12);
  EXPECT_NEAR(Quaternion::FromAxisAngle({1, 1, 0}, -2.0).Angle(), 2.0, 1e-12);
  EXPECT_NEAR(Quaternion::Identity().Angle(), 0.0, 1e-12);
}

TEST(RigidTransformTest, ComposeYawHalves) {
  const RigidTransform half{Quaternion::FromYaw(DegToRad(45.0)), {}};
  const RigidTransform full = Compose(half, half);
  EXPECT_NEAR(full.rotation.Yaw(), DegToRad(90.0), 1e-12);
  EXPECT_TRUE(Vec3Near(ApplyTransform(full, {1, 0, 0}), {0, 1, 0}, 1e-12));
}

TEST(RigidTransformTest, BodyToNedTranslates) {
  const NedPose pose{{10, 0, -5}, Quaternion::Identity()};
  EXPECT_TRUE(Vec3Near(BodyToNed(pose, {1, 0, 0}), {11, 0, -5}, 1e-12));
  EXPECT_TRUE(Vec3Near(NedToBody(pose, {11, 0, -5}), {1, 0, 0}, 1e-12));
}

TEST(RigidTransformTest, ComposeOrderMatchesSequentialApplication) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const RigidTransform a{RandomRotation(rng, kPi), RandomVector(rng, 10.0)};
    const RigidTransform b{RandomRotation(rng, kPi), RandomVector(rng, 10.0)};
    const Vec3 p = RandomVector(rng, 20.0);
    EXPECT_TRUE(Vec3Near(ApplyTransform(Compose(a, b), p), ApplyTransform(a, ApplyTransform(b, p)),
                         1e-9));
  }
}

// Property: compose with inverse is identity; transforms preserve distances.
TEST(RigidTransformTest, InverseAndRigidity) {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const RigidTransform t{RandomRotation(rng, kPi), RandomVector(rng, 100.0)};
    const RigidTransform id = Compose(t, t.Inverse());
    EXPECT_LT(id.rotation.Angle(), 1e-9);
    EXPECT_LT(id.translation.Norm(), 1e-9);
    const RigidTransform id2 = Compose(t.Inverse(), t);
    EXPECT_LT(id2.rotation.Angle(), 1e-9);
    EXPECT_LT(id2.translation.Norm(), 1e-9);

    const Vec3 p = RandomVector(rng, 50.0);
    const Vec3 q = RandomVector(rng, 50.0);
    EXPECT_NEAR(Distance(ApplyTransform(t, p), ApplyTransform(t, q)), Distance(p, q), 1e-9);
    EXPECT_TRUE(Vec3Near(ApplyTransform(t.Inverse(), ApplyTransform(t, p)), p, 1e-9));
  }
}

TEST(RayAabbTest, HitFromOutside) {
  const Ray ray = Ray::Through({0, 0, -1}, {1, 0, 0});
  const auto hit = RayAabb(ray, {5, -1, -2}, {7, 1, 0});
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(*hit, 5.0);
}

TEST(RayAabbTest, InsideOriginIsZero) {
  const auto hit = RayAabb(Ray::Through({6, 0, -1}, {1, 0, 0}), {5, -1, -2}, {7, 1, 0});
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(*hit, 0.0);
}

TEST(RayAabbTest, PointingAwayMisses) {
  EXPECT_FALSE(RayAabb(Ray::Through({0, 0, -1}, {-1, 0, 0}), {5, -1, -2}, {7, 1, 0}).has_value());
  EXPECT_FALSE(RayAabb(Ray::Through({0, 5, -1}, {1, 0, 0}), {5, -1, -2}, {7, 1, 0}).has_value());
}

TEST(RayAabbTest, AxisParallelRayOnSlabBoundary) {
  // Zero direction component with the origin inside the slab.
  const auto hit = RayAabb(Ray::Through({0, 1, -1}, {1, 0, 0}), {5, -1, -2}, {7, 1, 0});
  ASSERT_TRUE(hit.has_value());
  EXPECT_DOUBLE_EQ(*hit, 5.0);
}

// Property: every hit point lies on the box boundary.
TEST(RayAabbTest, HitPointsOnBoundary) {
  Rng rng(23);
  const Vec3 lo{-2, -3, -4};
  const Vec3 hi{3, 1, 2};
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 origin = RandomVector(rng, 20.0);
    const Vec3 toward = Vec3{rng.Uniform(lo.n, hi.n), rng.Uniform(lo.e, hi.e), rng.Uniform(lo.d, hi.d)};
    const Vec3 dir = rng.Uniform() < 0.8 ? toward - origin : RandomVector(rng, 1.0);
    if (dir.Norm() < 1e-6) continue;
    const Ray ray = Ray::Through(origin, dir);
    const auto t = RayAabb(ray, lo, hi);
    const bool inside = origin.n >= lo.n && origin.n <= hi.n && origin.e >= lo.e &&
                        origin.e <= hi.e && origin.d >= lo.d && origin.d <= hi.d;
    if (!t || inside) continue;
    ++hits;
    const Vec3 p = ray.At(*t);
    const double tol = 1e-9;
    const bool within = p.n >= lo.n - tol && p.n <= hi.n + tol && p.e >= lo.e - tol &&
                        p.e <= hi.e + tol && p.d >= lo.d - tol && p.d <= hi.d + tol;
    const double face = std::min({std::abs(p.n - lo.n), std::abs(p.n - hi.n), std::abs(p.e - lo.e),
                                  std::abs(p.e - hi.e), std::abs(p.d - lo.d), std::abs(p.d - hi.d)});
    EXPECT_TRUE(within);
    EXPECT_LT(face, 1e-9);
  }
  EXPECT_GT(hits, 1000);
}

}  // namespace
}  // namespace agsim
