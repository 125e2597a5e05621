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

#ifndef AGSIM_GEOMETRY_H_
#define AGSIM_GEOMETRY_H_

#include <cmath>
#include <optional>

namespace agsim {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
double WrapAngle(double rad);

// A point or direction in the global North-East-Down frame (meters). Body
// frames use the same layout with x forward, y right, z down.
struct Vec3 {
  double n = 0.0;
  double e = 0.0;
  double d = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {n + o.n, e + o.e, d + o.d}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {n - o.n, e - o.e, d - o.d}; }
  constexpr Vec3 operator-() const { return {-n, -e, -d}; }
  constexpr Vec3 operator*(double s) const { return {n * s, e * s, d * s}; }
  constexpr Vec3 operator/(double s) const { return {n / s, e / s, d / s}; }
  Vec3& operator+=(const Vec3& o) {
    n += o.n;
    e += o.e;
    d += o.d;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    n -= o.n;
    e -= o.e;
    d -= o.d;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double Dot(const Vec3& o) const { return n * o.n + e * o.e + d * o.d; }
  constexpr Vec3 Cross(const Vec3& o) const {
    return {e * o.d - d * o.e, d * o.n - n * o.d, n * o.e - e * o.n};
  }
  double Norm() const { return std::sqrt(Dot(*this)); }
  double SquaredNorm() const { return Dot(*this); }
  double HorizontalNorm() const { return std::hypot(n, e); }
  Vec3 Normalized() const { return *this / Norm(); }
  bool IsFinite() const {
    return std::isfinite(n) && std::isfinite(e) && std::isfinite(d);
  }
  // Altitude above d = 0 (up-positive).
  constexpr double Altitude() const { return 0.0 - d; }  // never -0.0
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

double Distance(const Vec3& a, const Vec3& b);
double HorizontalDistance(const Vec3& a, const Vec3& b);

// Unit quaternion rotating body-frame vectors into the parent frame.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion Identity() { return {}; }
  // Aerospace Z-Y-X convention: yaw about Down (positive North->East), then
  // pitch about the new right axis, then roll about the new forward axis.
  static Quaternion FromYawPitchRoll(double yaw, double pitch, double roll);
  static Quaternion FromYaw(double yaw) { return FromYawPitchRoll(yaw, 0.0, 0.0); }
  static Quaternion FromAxisAngle(const Vec3& axis, double angle);

  Quaternion operator*(const Quaternion& o) const;
  Quaternion Conjugate() const { return {w, -x, -y, -z}; }
  double Norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quaternion Normalized() const;
  Vec3 Rotate(const Vec3& v) const;

  double Yaw() const;
  double Pitch() const;
  double Roll() const;
  // Rotation angle in [0, pi].
  double Angle() const;
  bool IsUnit(double tol = 1e-9) const { return std::abs(Norm() - 1.0) <= tol; }
};

struct NedPose {
  Vec3 position;
  Quaternion orientation;

  double Yaw() const { return orientation.Yaw(); }
};

struct RigidTransform {
  Quaternion rotation;
  Vec3 translation;

  static RigidTransform Identity() { return {}; }
  static RigidTransform FromPose(const NedPose& pose) {
    return {pose.orientation, pose.position};
  }
  RigidTransform Inverse() const;
  NedPose ToPose() const { return {translation, rotation}; }
};

Vec3 ApplyTransform(const RigidTransform& t, const Vec3& p);

// apply(Compose(a, b), p) == apply(a, apply(b, p)).
RigidTransform Compose(const RigidTransform& a, const RigidTransform& b);

// Maps a body-frame point (x forward, y right, z down) into NED.
Vec3 BodyToNed(const NedPose& pose, const Vec3& p_body);
// Inverse of BodyToNed.
Vec3 NedToBody(const NedPose& pose, const Vec3& p_ned);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  // Normalizes `direction`.
  static Ray Through(const Vec3& origin, const Vec3& direction) {
    return {origin, direction.Normalized()};
  }
  Vec3 At(double t) const { return origin + direction * t; }
};

// Slab-method intersection with an axis-aligned box. Returns the smallest
// nonnegative hit distance; an origin inside (or on) the box yields 0.
std::optional<double> RayAabb(const Ray& ray, const Vec3& box_min, const Vec3& box_max);

}  // namespace agsim

#endif  // AGSIM_GEOMETRY_H_
