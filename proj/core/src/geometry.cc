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

#include <algorithm>
#include <limits>

namespace agsim {

double WrapAngle(double rad) {
  double wrapped = std::remainder(rad, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

double Distance(const Vec3& a, const Vec3& b) { return (a - b).Norm(); }

double HorizontalDistance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.n - b.n, a.e - b.e);
}

Quaternion Quaternion::FromYawPitchRoll(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw / 2), sy = std::sin(yaw / 2);
  const double cp = std::cos(pitch / 2), sp = std::sin(pitch / 2);
  const double cr = std::cos(roll / 2), sr = std::sin(roll / 2);
  return Quaternion{cr * cp * cy + sr * sp * sy, sr * cp * cy - cr * sp * sy,
                    cr * sp * cy + sr * cp * sy, cr * cp * sy - sr * sp * cy}
      .Normalized();
}

Quaternion Quaternion::FromAxisAngle(const Vec3& axis, double angle) {
  const Vec3 u = axis.Normalized();
  const double s = std::sin(angle / 2);
  return Quaternion{std::cos(angle / 2), u.n * s, u.e * s, u.d * s}.Normalized();
}

Quaternion Quaternion::operator*(const Quaternion& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
}

Quaternion Quaternion::Normalized() const {
  const double norm = Norm();
  return {w / norm, x / norm, y / norm, z / norm};
}

Vec3 Quaternion::Rotate(const Vec3& v) const {
  // v' = v + 2w(u x v) + 2u x (u x v)
  const Vec3 u{x, y, z};
  const Vec3 t = u.Cross(v) * 2.0;
  return v + t * w + u.Cross(t);
}

double Quaternion::Yaw() const {
  return std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
}

double Quaternion::Pitch() const {
  return std::asin(std::clamp(2.0 * (w * y - z * x), -1.0, 1.0));
}

double Quaternion::Roll() const {
  return std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
}

double Quaternion::Angle() const {
  const double vec = std::sqrt(x * x + y * y + z * z);
  return 2.0 * std::atan2(vec, std::abs(w));
}

RigidTransform RigidTransform::Inverse() const {
  const Quaternion inv = rotation.Conjugate();
  return {inv, -inv.Rotate(translation)};
}

Vec3 ApplyTransform(const RigidTransform& t, const Vec3& p) {
  return t.rotation.Rotate(p) + t.translation;
}

RigidTransform Compose(const RigidTransform& a, const RigidTransform& b) {
  return {(a.rotation * b.rotation).Normalized(), a.rotation.Rotate(b.translation) + a.translation};
}

Vec3 BodyToNed(const NedPose& pose, const Vec3& p_body) {
  return pose.orientation.Rotate(p_body) + pose.position;
}

Vec3 NedToBody(const NedPose& pose, const Vec3& p_ned) {
  return pose.orientation.Conjugate().Rotate(p_ned - pose.position);
}

std::optional<double> RayAabb(const Ray& ray, const Vec3& box_min, const Vec3& box_max) {
  const double origin[3] = {ray.origin.n, ray.origin.e, ray.origin.d};
  const double dir[3] = {ray.direction.n, ray.direction.e, ray.direction.d};
  const double lo[3] = {box_min.n, box_min.e, box_min.d};
  const double hi[3] = {box_max.n, box_max.e, box_max.d};

  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] == 0.0) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - origin[axis]) / dir[axis];
    double t1 = (hi[axis] - origin[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  if (t_exit < 0.0) return std::nullopt;
  return std::max(t_enter, 0.0);
}

}  // namespace agsim
