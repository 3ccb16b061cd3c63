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

#include "sim/contact_sim.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cf::sim {

void EnvParams::Validate() const {
  Require(stiffness > 0.0, ErrorCode::kDomain, "stiffness must be positive");
  Require(damping >= 0.0, ErrorCode::kDomain, "damping must be non-negative");
  Require(friction >= 0.0, ErrorCode::kDomain, "friction must be non-negative");
  Require(force_limit > 0.0, ErrorCode::kDomain, "force limit must be positive");
  Require(dt > 0.0, ErrorCode::kDomain, "time step must be positive");
  Require(std::abs(geom::Norm(normal) - 1.0) < 1e-9, ErrorCode::kDomain,
          "surface normal must be unit length");
}

double Penetration(const geom::Vec3& position, const EnvParams& env) {
  return std::max(0.0, env.surface_height - geom::Dot(position, env.normal));
}

geom::Wrench EnvForce(const geom::Pose6& pose, const geom::Pose6& velocity,
                      const EnvParams& env) {
  for (double v : pose) Require(std::isfinite(v), ErrorCode::kNumeric, "pose is not finite");
  for (double v : velocity)
    Require(std::isfinite(v), ErrorCode::kNumeric, "velocity is not finite");
  geom::Wrench w{};
  const double depth = Penetration({pose[0], pose[1], pose[2]}, env);
  if (depth <= 0.0) return w;
  const geom::Vec3 vel{velocity[0], velocity[1], velocity[2]};
  const double vn = geom::Dot(vel, env.normal);
  const double fn = env.stiffness * depth + env.damping * std::max(0.0, -vn);
  geom::Vec3 force = geom::Scale(env.normal, fn);
  const geom::Vec3 vt = geom::Sub(vel, geom::Scale(env.normal, vn));
  const double speed = geom::Norm(vt);
  if (speed > 1e-12 && env.friction > 0.0)
    force = geom::Add(force, geom::Scale(vt, -env.friction * fn / speed));
  std::copy(force.begin(), force.end(), w.begin());
  return w;
}

double NormalForce(const geom::Wrench& w, const EnvParams& env) {
  return geom::Dot(geom::ForcePart(w), env.normal);
}

bool IsOverload(const geom::Wrench& w, const EnvParams& env) {
  return geom::Norm(geom::ForcePart(w)) > env.force_limit;
}

SimState MakeState(const geom::Pose7& pose, const EnvParams& env) {
  SimState s;
  s.pose = geom::ToPose6(pose);
  s.wrench = EnvForce(s.pose, s.velocity, env);
  return s;
}

namespace {

SimState MoveTo(const SimState& state, const geom::Pose6& target, const EnvParams& env) {
  SimState next;
  next.pose = target;
  for (std::size_t i = 0; i < 6; ++i) next.velocity[i] = (target[i] - state.pose[i]) / env.dt;
  next.wrench = EnvForce(next.pose, next.velocity, env);
  next.step = state.step + 1;
  return next;
}

}  // namespace

SimState StepPositionOnly(const SimState& state, const geom::Pose7& target, const EnvParams& env) {
  for (double v : target) Require(std::isfinite(v), ErrorCode::kNumeric, "target is not finite");
  geom::Pose7 t = target;
  const geom::Quat q = geom::QuatNormalize(geom::Orientation(t));
  std::copy(q.begin(), q.end(), t.begin() + 3);
  return MoveTo(state, geom::ToPose6(t), env);
}

geom::Pose7 ApplyDelta(const geom::Pose7& pose, const geom::Pose7& delta) {
  geom::Pose7 out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = pose[i] + delta[i];
  const geom::Quat q = geom::QuatNormalize(
      geom::QuatMultiply(geom::QuatNormalize(geom::Orientation(delta)), geom::Orientation(pose)));
  std::copy(q.begin(), q.end(), out.begin() + 3);
  return out;
}

SimState StepHybrid(const SimState& state, const flow::ActionVector& action, const EnvParams& env,
                    const HybridGains& gains) {
  Require(gains.admittance >= 0.0, ErrorCode::kDomain, "admittance gain must be non-negative");
  for (double v : action.pose_delta)
    Require(std::isfinite(v), ErrorCode::kNumeric, "pose delta is not finite");
  for (double v : action.wrench)
    Require(std::isfinite(v), ErrorCode::kNumeric, "target wrench is not finite");
  geom::Pose7 commanded = ApplyDelta(state.pose7(), action.pose_delta);
  const double error = NormalForce(action.wrench, env) - NormalForce(state.wrench, env);
  for (std::size_t i = 0; i < 3; ++i) commanded[i] -= gains.admittance * error * env.normal[i];
  return MoveTo(state, geom::ToPose6(commanded), env);
}

SimState SettleStep(const SimState& state, const geom::Vec3& anchor, double mass,
                    double hold_stiffness, const EnvParams& env, std::size_t substeps) {
  Require(mass > 0.0 && substeps > 0, ErrorCode::kDomain, "settle needs mass and substeps");
  SimState s = state;
  const double h = env.dt / static_cast<double>(substeps);
  for (std::size_t k = 0; k < substeps; ++k) {
    const geom::Wrench contact = EnvForce(s.pose, s.velocity, env);
    for (std::size_t i = 0; i < 3; ++i) {
      const double force = contact[i] + hold_stiffness * (anchor[i] - s.pose[i]);
      s.velocity[i] += h * force / mass;
      s.pose[i] += h * s.velocity[i];
    }
  }
  s.wrench = EnvForce(s.pose, s.velocity, env);
  s.step = state.step + 1;
  return s;
}

Environment::Environment(const EnvParams& env, const geom::Pose7& start,
                         std::optional<SurfaceRise> perturbation)
    : env_(env), perturbation_(perturbation), base_height_(env.surface_height) {
  env_.Validate();
  state_ = MakeState(start, env_);
}

void Environment::BeforeStep() {
  if (!perturbation_ || !trigger_step_) return;
  const std::size_t since = state_.step - *trigger_step_;
  const double frac = std::min(1.0, static_cast<double>(since + 1) /
                                        static_cast<double>(std::max<std::size_t>(1, perturbation_->ramp_steps)));
  env_.surface_height = base_height_ + frac * perturbation_->rise;
}

void Environment::AfterStep(std::optional<double> commanded_normal) {
  const double magnitude = geom::Norm(geom::ForcePart(state_.wrench));
  peak_force_ = std::max(peak_force_, magnitude);
  if (IsOverload(state_.wrench, env_)) ++overloads_;
  if (commanded_normal && *commanded_normal != 0.0) {
    const double e = *commanded_normal - NormalForce(state_.wrench, env_);
    tracking_sq_ += e * e;
    ++tracking_n_;
  }
  if (perturbation_ && !trigger_step_ &&
      geom::Dot(state_.position(), env_.normal) - base_height_ <= perturbation_->trigger_gap)
    trigger_step_ = state_.step;
}

void Environment::StepPosition(const geom::Pose7& target) {
  BeforeStep();
  state_ = StepPositionOnly(state_, target, env_);
  AfterStep(std::nullopt);
}

void Environment::StepHybrid(const flow::ActionVector& action, const HybridGains& gains) {
  BeforeStep();
  state_ = sim::StepHybrid(state_, action, env_, gains);
  AfterStep(NormalForce(action.wrench, env_));
}

double Environment::force_rms() const {
  return tracking_n_ == 0 ? 0.0 : std::sqrt(tracking_sq_ / static_cast<double>(tracking_n_));
}

}  // namespace cf::sim
