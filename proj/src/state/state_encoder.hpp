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

#ifndef CONTACTFLOW_STATE_STATE_ENCODER_HPP_
#define CONTACTFLOW_STATE_STATE_ENCODER_HPP_

#include <cstddef>
#include <optional>
#include <string_view>

#include "nn/layers.hpp"
#include "state/geometry.hpp"

namespace cf::state {

inline constexpr double kForceScale = 100.0;   // N
inline constexpr double kTorqueScale = 15.0;   // N m
inline constexpr double kQuaternionTolerance = 1e-9;

struct ProprioState {
  geom::Pose7 pose{0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};

  // Throws kDomain when the quaternion is not unit within tolerance.
  void Validate() const;
};

// Force / 100 N, torque / 15 N m, clipped to [-1, 1].
std::array<double, 6> NormalizeWrench(const geom::Wrench& w);

enum class InjectionVariant { kVlmPathway, kMultimodalEncoder, kStateFusion };

std::string_view InjectionVariantName(InjectionVariant v);
InjectionVariant ParseInjectionVariant(std::string_view name);

// Where the force embedding enters the network for a given variant.
struct InjectionWiring {
  bool force_in_context = false;   // appended to E_in before fusion
  bool force_state_token = false;  // second state query token
  bool bypass = false;             // raw E_F appended to E_cond
};

InjectionWiring ApplyInjectionVariant(InjectionVariant variant);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
};

// E_cond = [E; E'_state; E_F] with the row span of each segment.
struct ConditionedSequence {
  nn::Var tokens;
  Span context;
  Span state;
  Span bypass;
};

class StateEncoder {
 public:
  static StateEncoder Create(nn::ParamSet& params, std::size_t width, std::size_t heads,
                             nn::Rng& rng, bool residual = true);

  // phi_P(p), 1 x width.
  nn::Var EncodePose(nn::Tape& tape, const ProprioState& state) const;
  // phi_F(normalize(f_raw)); `raw_wrench` is a 1x6 tape value so gradients
  // with respect to the raw reading are available.
  nn::Var EncodeForce(nn::Tape& tape, nn::Var raw_wrench) const;
  nn::Var EncodeForce(nn::Tape& tape, const geom::Wrench& raw_wrench) const;
  // State tokens attend to the context tokens (residual when enabled).
  nn::Var CrossModalCondition(nn::Tape& tape, nn::Var state_tokens, nn::Var context) const;

  const nn::Linear& pose_proj() const noexcept { return pose_proj_; }
  const nn::Linear& force_proj() const noexcept { return force_proj_; }
  const nn::AttentionLayer& cross() const noexcept { return cross_; }
  bool residual() const noexcept { return residual_; }

 private:
  nn::Linear pose_proj_;
  nn::Linear force_proj_;
  nn::AttentionLayer cross_;
  bool residual_ = true;
};

ConditionedSequence AssembleCondition(nn::Tape& tape, nn::Var context, nn::Var state,
                                      std::optional<nn::Var> bypass);

}  // namespace cf::state

#endif  // CONTACTFLOW_STATE_STATE_ENCODER_HPP_
