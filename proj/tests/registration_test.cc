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

#include <cmath>
#include <limits>

#include "agsim/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim::registration {
namespace {

using testing::RandomRotation;
using testing::RandomVector;
using testing::StructuredCloud;
using testing::Vec3Near;

std::vector<Vec3> Transformed(const RigidTransform& t, const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  for (const Vec3& p : points) out.push_back(ApplyTransform(t, p));
  return out;
}

// Determinant of the rotation matrix built column by column.
double Determinant(const Quaternion& q) {
  const Vec3 x = q.Rotate({1, 0, 0}), y = q.Rotate({0, 1, 0}), z = q.Rotate({0, 0, 1});
  return x.Dot(y.Cross(z));
}

TEST(BestFitTransformTest, Identity) {
  Rng rng(1);
  const auto pts = StructuredCloud(rng, 50);
  const RigidTransform t = BestFitTransform(pts, pts);
  EXPECT_LT(t.rotation.Angle(), 1e-9);
  EXPECT_LT(t.translation.Norm(), 1e-9);
}

TEST(BestFitTransformTest, PureTranslation) {
  Rng rng(2);
  const auto src = StructuredCloud(rng, 50);
  const auto dst = Transformed({{}, {1, 0, 0}}, src);
  const RigidTransform t = BestFitTransform(src, dst);
  EXPECT_LT(t.rotation.Angle(), 1e-9);
  EXPECT_TRUE(Vec3Near(t.translation, {1, 0, 0}, 1e-9));
}

TEST(BestFitTransformTest, YawNinetyOnBasisVectors) {
  const std::vector<Vec3> src = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto dst = Transformed({Quaternion::FromYaw(DegToRad(90)), {}}, src);
  const RigidTransform t = BestFitTransform(src, dst);
  EXPECT_TRUE(Vec3Near(t.rotation.Rotate({1, 0, 0}), {0, 1, 0}, 1e-9));
  EXPECT_TRUE(Vec3Near(t.rotation.Rotate({0, 1, 0}), {-1, 0, 0}, 1e-9));
  EXPECT_TRUE(Vec3Near(t.rotation.Rotate({0, 0, 1}), {0, 0, 1}, 1e-9));
}

// Property: random exact correspondences are recovered and the rotation is
// proper.
TEST(BestFitTransformTest, RandomRecoveryIsProperRotation) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const RigidTransform truth{RandomRotation(rng, kPi), RandomVector(rng, 20.0)};
    std::vector<Vec3> src;
    for (int k = 0; k < 10; ++k) src.push_back(RandomVector(rng, 10.0));
    const RigidTransform t = BestFitTransform(src, Transformed(truth, src));
    EXPECT_NEAR(Determinant(t.rotation), 1.0, 1e-9);
    EXPECT_TRUE(t.rotation.IsUnit(1e-9));
    EXPECT_LT(Compose(t, truth.Inverse()).rotation.Angle(), 1e-9);
    EXPECT_TRUE(Vec3Near(t.translation, truth.translation, 1e-8));
  }
}

TEST(BestFitTransformTest, ReflectionIsFixed) {
  // A mirrored target: the best proper rotation is returned, never a reflection.
  const std::vector<Vec3> src = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {-1, 2, 0}};
  std::vector<Vec3> dst;
  for (const Vec3& p : src) dst.push_back({p.n, p.e, -p.d});
  EXPECT_NEAR(Determinant(BestFitTransform(src, dst).rotation), 1.0, 1e-9);
}

TEST(BestFitTransformTest, Degenerate) {
  const std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  EXPECT_THROW(BestFitTransform(two, two), DegenerateInput);
  const std::vector<Vec3> line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  EXPECT_THROW(BestFitTransform(line, line), DegenerateInput);
}

// Oracle: linear scan with the same lowest-index tie rule.
std::optional<NearestNeighborIndex::Match> BruteNearest(const std::vector<Vec3>& pts, const Vec3& q,
                                                        double radius) {
  std::optional<NearestNeighborIndex::Match> best;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const double d2 = (pts[i] - q).SquaredNorm();
    if (d2 > radius * radius) continue;
    if (!best || d2 < best->squared_distance) best = NearestNeighborIndex::Match{i, d2};
  }
  return best;
}

TEST(NearestNeighborTest, MatchesBruteForce) {
  Rng rng(4);
  for (const double radius : {0.3, 1.0, 2.5}) {
    const auto pts = StructuredCloud(rng, 2000);
    const NearestNeighborIndex index(pts, radius);
    for (int i = 0; i < 3000; ++i) {
      const Vec3 q = pts[i % pts.size()] + RandomVector(rng, 3.0);
      const auto expected = BruteNearest(pts, q, radius);
      const auto actual = index.Nearest(q);
      ASSERT_EQ(actual.has_value(), expected.has_value());
      if (!actual) continue;
      EXPECT_EQ(actual->index, expected->index);
      EXPECT_EQ(actual->squared_distance, expected->squared_distance);
    }
  }
}

TEST(NearestNeighborTest, TiesGoToLowestIndex) {
  const std::vector<Vec3> pts = {{5, 5, 5}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {1, 0, 0}};
  const NearestNeighborIndex index(pts, 2.0);
  const auto m = index.Nearest({0, 0, 0});
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->index, 1);
}

TEST(NearestNeighborTest, UnboundedRadius) {
  const std::vector<Vec3> pts = {{100, 0, 0}, {0, 50, 0}};
  const NearestNeighborIndex index(pts, std::numeric_limits<double>::infinity());
  const auto m = index.Nearest({0, 0, 0});
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->index, 1);
}

TEST(IcpTest, IdenticalClouds) {
  Rng rng(5);
  const auto pts = StructuredCloud(rng, 500);
  const IcpResult r = Icp(pts, pts, RigidTransform::Identity(), {});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_LT(r.rmse, 1e-12);
}

TEST(IcpTest, RecoversShift) {
  Rng rng(6);
  const auto target = StructuredCloud(rng, 500);
  const auto source = Transformed({{}, {0.3, -0.1, 0.2}}, target);
  IcpParams params;
  params.max_iterations = 100;
  params.convergence_eps = 1e-12;
  const IcpResult r = Icp(source, target, RigidTransform::Identity(), params);
  EXPECT_TRUE(Vec3Near(r.transform.translation, {-0.3, 0.1, -0.2}, 1e-3));
  EXPECT_LT(r.rmse, 1e-6);
}

// Property: the per-iteration RMSE never increases.
TEST(IcpTest, RmseMonotone) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto target = StructuredCloud(rng, 400);
    const RigidTransform perturb{RandomRotation(rng, DegToRad(15)), RandomVector(rng, 0.8)};
    auto source = Transformed(perturb, target);
    for (Vec3& p : source) p += RandomVector(rng, 0.05);
    IcpParams params;
    params.convergence_eps = 1e-15;
    params.max_iterations = 40;
    const IcpResult r = Icp(source, target, RigidTransform::Identity(), params);
    ASSERT_FALSE(r.rmse_history.empty());
    for (std::size_t i = 1; i < r.rmse_history.size(); ++i) {
      EXPECT_LE(r.rmse_history[i], r.rmse_history[i - 1] + 1e-9) << "trial " << trial << " iter " << i;
    }
    EXPECT_LE(r.rmse, r.rmse_history.back() + 1e-9);
  }
}

TEST(IcpTest, InsufficientCorrespondences) {
  const std::vector<Vec3> a = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const std::vector<Vec3> b = Transformed({{}, {50, 0, 0}}, a);
  EXPECT_THROW(Icp(a, b, RigidTransform::Identity(), {}), InsufficientCorrespondences);
}

TEST(CloudRmseTest, Examples) {
  const std::vector<Vec3> one = {{0, 0, 0}};
  EXPECT_DOUBLE_EQ(CloudRmse(one, one, RigidTransform::Identity(), 1.0), 0.0);
  const std::vector<Vec3> other = {{1, 0, 0}};
  EXPECT_DOUBLE_EQ(CloudRmse(one, other, RigidTransform::Identity(), 2.0), 1.0);
  // Residuals 3 and 4.
  const std::vector<Vec3> src = {{0, 0, 0}, {100, 0, 0}};
  const std::vector<Vec3> dst = {{3, 0, 0}, {104, 0, 0}};
  EXPECT_NEAR(CloudRmse(src, dst, RigidTransform::Identity(), 5.0), std::sqrt(12.5), 1e-12);
  EXPECT_THROW(CloudRmse(src, dst, RigidTransform::Identity(), 2.0), NoPairs);
}

TEST(VoxelDownsampleTest, CentroidPerVoxel) {
  const std::vector<Vec3> pts = {{0.1, 0.1, 0.1}, {0.3, 0.3, 0.3}, {1.5, 0.2, 0.2}};
  const auto out = VoxelDownsample(pts, 1.0);
  ASSERT_EQ(out.size(), 2u);
  bool found = false;
  for (const Vec3& p : out) found |= Distance(p, {0.2, 0.2, 0.2}) < 1e-12;
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace agsim::registration
