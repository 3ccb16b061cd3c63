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

#ifndef CONTACTFLOW_MOE_CROSS_SCALE_MOE_HPP_
#define CONTACTFLOW_MOE_CROSS_SCALE_MOE_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "nn/layers.hpp"
#include "state/state_encoder.hpp"

namespace cf::moe {

inline constexpr std::size_t kExpertCount = 3;
enum Expert : std::size_t { kVisual = 0, kState = 1, kForce = 2 };

using GateWeights = std::array<double, kExpertCount>;

enum class RoutingMode { kSoft, kTop1 };

RoutingMode ParseRoutingMode(std::string_view name);

// Which modality rows feed the mixture. The state pathway is always present.
struct AblationMask {
  bool visual = true;
  bool force = true;
};

// Softmax of three logits.
GateWeights GateFromLogits(std::span<const double> logits);
// Soft mode is the identity; top1 is one-hot at the argmax, lowest index on ties.
GateWeights Top1Route(const GateWeights& weights, RoutingMode mode);

// Removes the masked modality rows (context span for visual, bypass span for
// force). Throws kDomain when nothing is left.
nn::Var ApplyMask(nn::Tape& tape, const state::ConditionedSequence& seq,
                  const AblationMask& mask);

class CrossScaleMoe {
 public:
  static CrossScaleMoe Create(nn::ParamSet& params, std::size_t width, nn::Rng& rng,
                              std::size_t hidden_ratio = 4);

  std::size_t width() const noexcept { return width_; }

  // n x 3 routing weights for each row of `tokens`.
  nn::Var Gate(nn::Tape& tape, nn::Var tokens) const;
  nn::Var ExpertOutput(nn::Tape& tape, std::size_t expert, nn::Var tokens) const;

  // E_MoE = sum_m w_m Expert_m(x) row by row. `gate_override` replaces the
  // learned weights (n x 3) when given.
  nn::Var Forward(nn::Tape& tape, nn::Var tokens, RoutingMode mode,
                  std::optional<nn::Var> gate_override = std::nullopt) const;
  nn::Var Forward(nn::Tape& tape, const state::ConditionedSequence& seq,
                  const AblationMask& mask, RoutingMode mode) const;

  const nn::Linear& gate_layer() const noexcept { return gate_; }
  const nn::Mlp& expert(std::size_t m) const { return experts_.at(m); }

 private:
  std::size_t width_ = 0;
  nn::Linear gate_;
  std::array<nn::Mlp, kExpertCount> experts_;
};

}  // namespace cf::moe

#endif  // CONTACTFLOW_MOE_CROSS_SCALE_MOE_HPP_
