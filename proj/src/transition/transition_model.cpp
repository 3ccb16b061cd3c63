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

#include "transition/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "nn/rng.hpp"

namespace cf::transition {

void TransitionParams::Validate() const {
  Require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::kDomain, "alpha must be positive");
  Require(std::isfinite(rate) && rate > 0.0, ErrorCode::kDomain, "lambda must be positive");
  Require(std::isfinite(force.lower) && std::isfinite(force.upper) && force.lower < force.upper,
          ErrorCode::kDomain, "force bounds need n < m");
}

double OrientationAlignment(const geom::Vec3& e, const geom::Vec3& target) {
  const double ne = geom::Norm(e);
  const double nt = geom::Norm(target);
  Require(ne > 0.0 && nt > 0.0, ErrorCode::kDomain, "orientation vector is zero");
  const double c = std::clamp(geom::Dot(e, target) / (ne * nt), -1.0, 1.0);
  return 0.5 * (c + 1.0);
}

double RemainingDistance(const geom::Vec3& a, const geom::Vec3& target) {
  return geom::Norm(geom::Sub(target, a));
}

double ForceMagnitude(const geom::Wrench& w, const ForceBounds& bounds) {
  Require(bounds.lower < bounds.upper, ErrorCode::kDomain, "force bounds need n < m");
  return std::clamp(geom::Norm(geom::ForcePart(w)), bounds.lower, bounds.upper);
}

namespace {

bool IsSmallInteger(double a) { return a == std::floor(a) && a >= 1.0 && a <= 170.0; }

double Factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double Gamma(double alpha) {
  Require(alpha > 0.0, ErrorCode::kDomain, "Gamma needs a positive argument");
  if (IsSmallInteger(alpha)) return Factorial(static_cast<int>(alpha) - 1);
  return std::tgamma(alpha);
}

double GammaRatio(double alpha) { return Gamma(alpha + 1.0) / (alpha * Gamma(alpha)); }

namespace {

void CheckObservation(const TransitionObservation& obs) {
  obs.params.Validate();
  Require(obs.alignment >= 0.0 && obs.alignment <= 1.0, ErrorCode::kDomain,
          "alignment outside [0, 1]");
  Require(obs.distance >= 0.0 && std::isfinite(obs.distance), ErrorCode::kDomain,
          "distance must be non-negative");
  Require(std::isfinite(obs.force), ErrorCode::kDomain, "force is not finite");
}

double ForceFactor(const TransitionObservation& obs) {
  const ForceBounds& b = obs.params.force;
  const double f = std::clamp(obs.force, b.lower, b.upper);
  return (f - b.lower) / (b.upper - b.lower);
}

}  // namespace

double TransitionProbability(const TransitionObservation& obs) {
  CheckObservation(obs);
  const double a = obs.params.alpha;
  return GammaRatio(a) * std::pow(obs.alignment, a) * std::exp(-obs.params.rate * obs.distance) *
         ForceFactor(obs);
}

double TransitionProbabilitySimplified(const TransitionObservation& obs) {
  CheckObservation(obs);
  return std::pow(obs.alignment, obs.params.alpha) *
         std::exp(-obs.params.rate * obs.distance) * ForceFactor(obs);
}

MonteCarloEstimate MonteCarloTransition(const TransitionObservation& obs, std::size_t samples,
                                        std::uint64_t seed) {
  CheckObservation(obs);
  Require(samples >= 10000, ErrorCode::kDomain, "Monte Carlo oracle needs at least 1e4 samples");
  nn::Rng rng(seed);
  const double inv_alpha = 1.0 / obs.params.alpha;
  const double n = obs.params.force.lower;
  const double m = obs.params.force.upper;
  const double f = std::clamp(obs.force, n, m);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double theta = std::pow(rng.UniformOpenZero(), inv_alpha);
    const double length = -std::log(rng.UniformOpenZero()) / obs.params.rate;
    const double force = rng.Uniform(n, m);
    if (theta <= obs.alignment && length >= obs.distance && force <= f) ++hits;
  }
  MonteCarloEstimate out;
  out.samples = samples;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
  return out;
}

TransitionObservation Observe(const geom::Pose7& pose, const geom::Wrench& wrench,
                              const SubtaskTarget& target, const TransitionParams& params) {
  TransitionObservation obs;
  obs.params = params;
  obs.alignment = OrientationAlignment(geom::ForwardAxis(geom::Orientation(pose)),
                                       geom::ForwardAxis(geom::Orientation(target.pose)));
  obs.distance = RemainingDistance(geom::Position(pose), geom::Position(target.pose));
  if (target.force) {
    obs.params.force = *target.force;
    obs.force = ForceMagnitude(wrench, *target.force);
  } else {
    obs.force = obs.params.force.upper;
  }
  return obs;
}

double SubtaskProgress(const geom::Pose7& pose, const geom::Wrench& wrench,
                       const SubtaskTarget& target, const TransitionParams& params) {
  return TransitionProbability(Observe(pose, wrench, target, params));
}

void TransitionState::Validate() const {
  Require(threshold > 0.0 && threshold <= 1.0, ErrorCode::kDomain,
          "transition threshold must lie in (0, 1]");
  Require(count >= 1 && index < count, ErrorCode::kDomain, "subtask index out of range");
  Require(progress >= 0.0 && progress <= 1.0, ErrorCode::kDomain, "progress outside [0, 1]");
}

TransitionState SubtaskStep(const TransitionState& state, double predicted) {
  state.Validate();
  TransitionState next = state;
  const double s = std::clamp(predicted, 0.0, 1.0);
  if (s >= state.threshold) {
    if (!state.terminal()) ++next.index;
    next.progress = 0.0;
  } else {
    next.progress = s;
  }
  return next;
}

}  // namespace cf::transition
