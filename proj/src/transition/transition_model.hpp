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

#ifndef CONTACTFLOW_TRANSITION_TRANSITION_MODEL_HPP_
#define CONTACTFLOW_TRANSITION_TRANSITION_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "state/geometry.hpp"

namespace cf::transition {

struct ForceBounds {
  double lower = 0.0;    // n, newtons
  double upper = 100.0;  // m, newtons
};

struct TransitionParams {
  double alpha = 2.0;
  double rate = 2.0;  // lambda, 1/m
  ForceBounds force;

  void Validate() const;
};

struct TransitionObservation {
  double alignment = 1.0;  // theta in [0, 1]
  double distance = 0.0;   // metres
  double force = 0.0;      // newtons, clipped to the bounds
  TransitionParams params;
};

// 0.5 (cos angle + 1). Throws kDomain for a zero vector.
double OrientationAlignment(const geom::Vec3& e, const geom::Vec3& target);
double RemainingDistance(const geom::Vec3& a, const geom::Vec3& target);
// |force part| clipped to [n, m].
double ForceMagnitude(const geom::Wrench& w, const ForceBounds& bounds);

// Gamma(alpha + 1) / (alpha Gamma(alpha)); exact factorials for integer alpha.
double GammaRatio(double alpha);
double Gamma(double alpha);

// P(Theta <= theta, L >= l, F <= f) under Beta(alpha, 1) x Exp(lambda) x U(n, m),
// including the Gamma normalizing ratio.
double TransitionProbability(const TransitionObservation& obs);
// theta^alpha exp(-lambda l) (f - n) / (m - n) without the Gamma ratio.
double TransitionProbabilitySimplified(const TransitionObservation& obs);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

// Empirical frequency of the joint event with binomial standard error.
MonteCarloEstimate MonteCarloTransition(const TransitionObservation& obs, std::size_t samples,
                                        std::uint64_t seed);

// Target of one subtask: its end pose and, for contact subtasks, force bounds.
// Without bounds the force factor is taken as 1.
struct SubtaskTarget {
  geom::Pose7 pose{0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  std::optional<ForceBounds> force;
};

TransitionObservation Observe(const geom::Pose7& pose, const geom::Wrench& wrench,
                              const SubtaskTarget& target, const TransitionParams& params);
// Ground-truth progress of `pose`/`wrench` towards `target`.
double SubtaskProgress(const geom::Pose7& pose, const geom::Wrench& wrench,
                       const SubtaskTarget& target, const TransitionParams& params);

struct TransitionState {
  std::size_t index = 0;
  std::size_t count = 1;  // number of subtasks
  double progress = 0.0;
  double threshold = 0.9;

  void Validate() const;
  bool terminal() const noexcept { return index + 1 >= count; }
};

// Advances (saturating) and resets when s reaches the threshold.
TransitionState SubtaskStep(const TransitionState& state, double predicted);

}  // namespace cf::transition

#endif  // CONTACTFLOW_TRANSITION_TRANSITION_MODEL_HPP_
