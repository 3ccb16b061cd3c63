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

#include "state/state_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace cf::state {

void ProprioState::Validate() const {
  for (double v : pose)
    Require(std::isfinite(v), ErrorCode::kNumeric, "pose is not finite");
  const double n = geom::QuatNorm(geom::Orientation(pose));
  Require(std::abs(n - 1.0) <= kQuaternionTolerance, ErrorCode::kDomain,
          "pose quaternion is not unit (norm " + std::to_string(n) + ")");
}

std::array<double, 6> NormalizeWrench(const geom::Wrench& w) {
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    const double scale = i < 3 ? kForceScale : kTorqueScale;
    out[i] = std::clamp(w[i] / scale, -1.0, 1.0);
  }
  return out;
}

std::string_view InjectionVariantName(InjectionVariant v) {
  switch (v) {
    case InjectionVariant::kVlmPathway: return "vlm_pathway";
    case InjectionVariant::kMultimodalEncoder: return "multimodal_encoder";
    case InjectionVariant::kStateFusion: return "state_fusion";
  }
  return "state_fusion";
}

InjectionVariant ParseInjectionVariant(std::string_view name) {
  if (name == "vlm_pathway") return InjectionVariant::kVlmPathway;
  if (name == "multimodal_encoder") return InjectionVariant::kMultimodalEncoder;
  if (name == "state_fusion") return InjectionVariant::kStateFusion;
  Fail(ErrorCode::kUsage, "unknown injection variant '" + std::string(name) + "'");
}

InjectionWiring ApplyInjectionVariant(InjectionVariant variant) {
  switch (variant) {
    case InjectionVariant::kVlmPathway: return {true, false, false};
    case InjectionVariant::kMultimodalEncoder: return {false, true, false};
    case InjectionVariant::kStateFusion: return {false, true, true};
  }
  return {false, true, true};
}

StateEncoder StateEncoder::Create(nn::ParamSet& params, std::size_t width, std::size_t heads,
                                  nn::Rng& rng, bool residual) {
  StateEncoder e;
  e.pose_proj_ = nn::Linear::Create(params, "state.pose", 7, width, rng);
  e.force_proj_ = nn::Linear::Create(params, "state.force", 6, width, rng);
  e.cross_ = nn::AttentionLayer::Create(params, "state.cross", width, heads, rng);
  e.residual_ = residual;
  return e;
}

nn::Var StateEncoder::EncodePose(nn::Tape& tape, const ProprioState& state) const {
  state.Validate();
  return pose_proj_.Apply(tape, tape.Constant(nn::Matrix::RowVector(state.pose)));
}

nn::Var StateEncoder::EncodeForce(nn::Tape& tape, nn::Var raw_wrench) const {
  const nn::Matrix& w = tape.value(raw_wrench);
  Require(w.rows() == 1 && w.cols() == 6, ErrorCode::kDimension, "wrench must be 1x6");
  Require(w.AllFinite(), ErrorCode::kNumeric, "wrench is not finite");
  nn::Matrix scale(1, 6);
  for (std::size_t i = 0; i < 6; ++i) scale(0, i) = 1.0 / (i < 3 ? kForceScale : kTorqueScale);
  nn::Var normalized = tape.Clamp(tape.Mul(raw_wrench, tape.Constant(std::move(scale))), -1.0, 1.0);
  return force_proj_.Apply(tape, normalized);
}

nn::Var StateEncoder::EncodeForce(nn::Tape& tape, const geom::Wrench& raw_wrench) const {
  return EncodeForce(tape, tape.Constant(nn::Matrix::RowVector(raw_wrench)));
}

nn::Var StateEncoder::CrossModalCondition(nn::Tape& tape, nn::Var state_tokens,
                                          nn::Var context) const {
  Require(tape.value(context).rows() > 0, ErrorCode::kDomain, "empty context sequence");
  nn::Var attended = cross_.Apply(tape, state_tokens, context);
  return residual_ ? tape.Add(state_tokens, attended) : attended;
}

ConditionedSequence AssembleCondition(nn::Tape& tape, nn::Var context, nn::Var state,
                                      std::optional<nn::Var> bypass) {
  const std::size_t width = tape.value(context).cols();
  Require(tape.value(state).cols() == width, ErrorCode::kDimension,
          "state tokens and context disagree on width");
  std::vector<nn::Var> parts{context, state};
  if (bypass) {
    Require(tape.value(*bypass).cols() == width && tape.value(*bypass).rows() == 1,
            ErrorCode::kDimension, "bypass must be a single token of the model width");
    parts.push_back(*bypass);
  }
  ConditionedSequence seq;
  seq.tokens = tape.ConcatRows(parts);
  const std::size_t nc = tape.value(context).rows();
  const std::size_t ns = tape.value(state).rows();
  seq.context = {0, nc};
  seq.state = {nc, nc + ns};
  seq.bypass = {nc + ns, nc + ns + (bypass ? 1u : 0u)};
  return seq;
}

}  // namespace cf::state
