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

#include "moe/cross_scale_moe.hpp"

#include <string>
#include <vector>

#include "error.hpp"

namespace cf::moe {

RoutingMode ParseRoutingMode(std::string_view name) {
  if (name == "soft") return RoutingMode::kSoft;
  if (name == "top1") return RoutingMode::kTop1;
  Fail(ErrorCode::kUsage, "unknown routing mode '" + std::string(name) + "'");
}

GateWeights GateFromLogits(std::span<const double> logits) {
  Require(logits.size() == kExpertCount, ErrorCode::kDimension, "gate expects three logits");
  std::vector<double> soft = nn::Softmax(logits);
  return {soft[0], soft[1], soft[2]};
}

GateWeights Top1Route(const GateWeights& weights, RoutingMode mode) {
  if (mode == RoutingMode::kSoft) return weights;
  std::size_t best = 0;
  for (std::size_t m = 1; m < kExpertCount; ++m)
    if (weights[m] > weights[best]) best = m;
  GateWeights out{};
  out[best] = 1.0;
  return out;
}

nn::Var ApplyMask(nn::Tape& tape, const state::ConditionedSequence& seq,
                  const AblationMask& mask) {
  std::vector<nn::Var> kept;
  if (mask.visual && !seq.context.empty())
    kept.push_back(tape.SliceRows(seq.tokens, seq.context.begin, seq.context.end));
  if (!seq.state.empty())
    kept.push_back(tape.SliceRows(seq.tokens, seq.state.begin, seq.state.end));
  if (mask.force && !seq.bypass.empty())
    kept.push_back(tape.SliceRows(seq.tokens, seq.bypass.begin, seq.bypass.end));
  Require(!kept.empty(), ErrorCode::kDomain, "every modality is masked out of the mixture");
  if (kept.size() == 1) return kept.front();
  return tape.ConcatRows(kept);
}

CrossScaleMoe CrossScaleMoe::Create(nn::ParamSet& params, std::size_t width, nn::Rng& rng,
                                    std::size_t hidden_ratio) {
  static constexpr const char* kNames[kExpertCount] = {"visual", "state", "force"};
  CrossScaleMoe moe;
  moe.width_ = width;
  moe.gate_ = nn::Linear::Create(params, "moe.gate", width, kExpertCount, rng);
  const std::array<std::size_t, 3> widths{width, hidden_ratio * width, width};
  for (std::size_t m = 0; m < kExpertCount; ++m)
    moe.experts_[m] =
        nn::Mlp::Create(params, std::string("moe.expert.") + kNames[m], widths, rng);
  return moe;
}

nn::Var CrossScaleMoe::Gate(nn::Tape& tape, nn::Var tokens) const {
  return tape.SoftmaxRows(gate_.Apply(tape, tokens));
}

nn::Var CrossScaleMoe::ExpertOutput(nn::Tape& tape, std::size_t expert, nn::Var tokens) const {
  return experts_.at(expert).Apply(tape, tokens);
}

nn::Var CrossScaleMoe::Forward(nn::Tape& tape, nn::Var tokens, RoutingMode mode,
                               std::optional<nn::Var> gate_override) const {
  const nn::Matrix& x = tape.value(tokens);
  Require(x.rows() > 0, ErrorCode::kDomain, "empty token sequence");
  Require(x.cols() == width_, ErrorCode::kDimension,
          "token width " + std::to_string(x.cols()) + " does not match mixture width " +
              std::to_string(width_));
  Require(x.AllFinite(), ErrorCode::kNumeric, "non-finite token entering the mixture");
  nn::Var weights = gate_override ? *gate_override : Gate(tape, tokens);
  const nn::Matrix& w = tape.value(weights);
  Require(w.rows() == x.rows() && w.cols() == kExpertCount, ErrorCode::kDimension,
          "gate weights must be tokens x 3");
  if (mode == RoutingMode::kTop1) weights = tape.Constant(tape.value(tape.OneHotArgmax(weights)));

  nn::Var total{};
  for (std::size_t m = 0; m < kExpertCount; ++m) {
    nn::Var column = tape.SliceCols(weights, m, m + 1);
    nn::Var term = tape.ScaleRows(ExpertOutput(tape, m, tokens), column);
    total = total.valid() ? tape.Add(total, term) : term;
  }
  return total;
}

nn::Var CrossScaleMoe::Forward(nn::Tape& tape, const state::ConditionedSequence& seq,
                               const AblationMask& mask, RoutingMode mode) const {
  return Forward(tape, ApplyMask(tape, seq, mask), mode);
}

}  // namespace cf::moe
