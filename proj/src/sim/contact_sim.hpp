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

#ifndef CONTACTFLOW_SIM_CONTACT_SIM_HPP_
#define CONTACTFLOW_SIM_CONTACT_SIM_HPP_

#include <cstddef>
#include <optional>

#include "flow/flow_head.hpp"
#include "state/geometry.hpp"

namespace cf::sim {

inline constexpr double kControlPeriod = 1.0 / 30.0;

struct EnvParams {
  double surface_height = 0.0;       // offset of the plane along the normal
  geom::Vec3 normal{0.0, 0.0, 1.0};  // unit, pointing out of the surface
  double stiffness = 1000.0;         // N/m
  double damping = 5.0;              // N s/m
  double friction = 0.2;
  double force_limit = 100.0;        // N
  double dt = kControlPeriod;

  void Validate() const;
};

struct SimState {
  geom::Pose6 pose{};
  geom::Pose6 velocity{};
  geom::Wrench wrench{};  // contact force acting on the end-effector
  std::size_t step = 0;

  geom::Vec3 position() const { return {pose[0], pose[1], pose[2]}; }
  geom::Pose7 pose7() const { return geom::ToPose7(pose); }
};

double Penetration(const geom::Vec3& position, const EnvParams& env);
// Spring-damper plane contact with Coulomb-like tangential drag; zero torque.
geom::Wrench EnvForce(const geom::Pose6& pose, const geom::Pose6& velocity,
                      const EnvParams& env);
// Component of the wrench force along the surface normal.
double NormalForce(const geom::Wrench& w, const EnvParams& env);
bool IsOverload(const geom::Wrench& w, const EnvParams& env);

SimState MakeState(const geom::Pose7& pose, const EnvParams& env);

// Ideal tracking: the pose jumps to the target.
SimState StepPositionOnly(const SimState& state, const geom::Pose7& target, const EnvParams& env);

struct HybridGains {
  double admittance = 5e-4;  // m/N along the contact normal
};

// Commanded pose = current + delta, then shifted along the normal by
// -G (f_target - f_measured) in the contact-force-on-tool convention.
SimState StepHybrid(const SimState& state, const flow::ActionVector& action, const EnvParams& env,
                    const HybridGains& gains);
// The commanded pose before admittance correction.
geom::Pose7 ApplyDelta(const geom::Pose7& pose, const geom::Pose7& delta);

// Unactuated settle of a tool of `mass` held by a spring of `hold_stiffness`
// to `anchor`, integrated with `substeps` semi-implicit Euler steps per period.
SimState SettleStep(const SimState& state, const geom::Vec3& anchor, double mass,
                    double hold_stiffness, const EnvParams& env, std::size_t substeps = 10);

// Surface rising by `rise` over `ramp_steps` once the tool first comes within
// `trigger_gap` of the unperturbed surface (the robot mount dropping towards it).
// A tool held still at the trigger height ends up 0.14 m inside the surface.
struct SurfaceRise {
  double rise = 0.15;
  std::size_t ramp_steps = 5;
  double trigger_gap = 0.01;
};

struct RolloutMetrics {
  bool success = false;
  std::size_t overloads = 0;
  double force_rms = 0.0;
  std::size_t steps = 0;
  double peak_force = 0.0;
};

// A plane environment with optional mid-episode perturbation and running metrics.
class Environment {
 public:
  Environment(const EnvParams& env, const geom::Pose7& start,
              std::optional<SurfaceRise> perturbation = std::nullopt);

  const EnvParams& params() const noexcept { return env_; }
  const SimState& state() const noexcept { return state_; }
  bool perturbed() const noexcept { return trigger_step_.has_value(); }

  void StepPosition(const geom::Pose7& target);
  void StepHybrid(const flow::ActionVector& action, const HybridGains& gains);

  std::size_t overloads() const noexcept { return overloads_; }
  double peak_force() const noexcept { return peak_force_; }
  double force_rms() const;

 private:
  void BeforeStep();
  void AfterStep(std::optional<double> commanded_normal);

  EnvParams env_;
  SimState state_;
  std::optional<SurfaceRise> perturbation_;
  std::optional<std::size_t> trigger_step_;
  double base_height_ = 0.0;
  std::size_t overloads_ = 0;
  double peak_force_ = 0.0;
  double tracking_sq_ = 0.0;
  std::size_t tracking_n_ = 0;
};

}  // namespace cf::sim

#endif  // CONTACTFLOW_SIM_CONTACT_SIM_HPP_
