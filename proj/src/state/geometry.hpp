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

#ifndef CONTACTFLOW_STATE_GEOMETRY_HPP_
#define CONTACTFLOW_STATE_GEOMETRY_HPP_

#include <array>

namespace cf::geom {

using Vec3 = std::array<double, 3>;
// Unit quaternion, scalar first: (w, x, y, z).
using Quat = std::array<double, 4>;
// Position (m) followed by orientation quaternion.
using Pose7 = std::array<double, 7>;
// Position (m) followed by rotation vector (rad).
using Pose6 = std::array<double, 6>;
// Force (N) followed by torque (N m).
using Wrench = std::array<double, 6>;

inline constexpr Quat kIdentityQuat{1.0, 0.0, 0.0, 0.0};

double Dot(const Vec3& a, const Vec3& b);
double Norm(const Vec3& a);
Vec3 Add(const Vec3& a, const Vec3& b);
Vec3 Sub(const Vec3& a, const Vec3& b);
Vec3 Scale(const Vec3& a, double s);

double QuatNorm(const Quat& q);
// A zero-norm quaternion normalizes to identity.
Quat QuatNormalize(const Quat& q);
Quat QuatMultiply(const Quat& a, const Quat& b);
Vec3 QuatRotate(const Quat& q, const Vec3& v);
Quat QuatFromRotationVector(const Vec3& r);
Vec3 RotationVectorFromQuat(const Quat& q);
// The rotated unit z axis, used as the tool's pointing direction.
Vec3 ForwardAxis(const Quat& q);

Vec3 Position(const Pose7& p);
Quat Orientation(const Pose7& p);
Pose7 ToPose7(const Pose6& p);
Pose6 ToPose6(const Pose7& p);

Vec3 ForcePart(const Wrench& w);

}  // namespace cf::geom

#endif  // CONTACTFLOW_STATE_GEOMETRY_HPP_
