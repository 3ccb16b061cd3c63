// Copyright 2026 The contactflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "state/geometry.hpp"

#include <cmath>

namespace cf::geom {

double Dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double Norm(const Vec3& a) { return std::sqrt(Dot(a, a)); }
Vec3 Add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 Sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 Scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

double QuatNorm(const Quat& q) {
  return std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
}

Quat QuatNormalize(const Quat& q) {
  const double n = QuatNorm(q);
  if (n < 1e-12) return kIdentityQuat;
  return {q[0] / n, q[1] / n, q[2] / n, q[3] / n};
}

Quat QuatMultiply(const Quat& a, const Quat& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Vec3 QuatRotate(const Quat& q, const Vec3& v) {
  const Quat p{0.0, v[0], v[1], v[2]};
  const Quat conj{q[0], -q[1], -q[2], -q[3]};
  const Quat r = QuatMultiply(QuatMultiply(q, p), conj);
  return {r[1], r[2], r[3]};
}

Quat QuatFromRotationVector(const Vec3& r) {
  const double angle = Norm(r);
  if (angle < 1e-12) return kIdentityQuat;
  const double s = std::sin(0.5 * angle) / angle;
  return {std::cos(0.5 * angle), r[0] * s, r[1] * s, r[2] * s};
}

Vec3 RotationVectorFromQuat(const Quat& q_in) {
  Quat q = QuatNormalize(q_in);
  if (q[0] < 0.0) q = {-q[0], -q[1], -q[2], -q[3]};
  const Vec3 axis{q[1], q[2], q[3]};
  const double s = Norm(axis);
  if (s < 1e-12) return {0.0, 0.0, 0.0};
  const double angle = 2.0 * std::atan2(s, q[0]);
  return Scale(axis, angle / s);
}

Vec3 ForwardAxis(const Quat& q) { return QuatRotate(QuatNormalize(q), {0.0, 0.0, 1.0}); }

Vec3 Position(const Pose7& p) { return {p[0], p[1], p[2]}; }
Quat Orientation(const Pose7& p) { return {p[3], p[4], p[5], p[6]}; }

Pose7 ToPose7(const Pose6& p) {
  const Quat q = QuatFromRotationVector({p[3], p[4], p[5]});
  return {p[0], p[1], p[2], q[0], q[1], q[2], q[3]};
}

Pose6 ToPose6(const Pose7& p) {
  const Vec3 r = RotationVectorFromQuat(Orientation(p));
  return {p[0], p[1], p[2], r[0], r[1], r[2]};
}

Vec3 ForcePart(const Wrench& w) { return {w[0], w[1], w[2]}; }

}  // namespace cf::geom
