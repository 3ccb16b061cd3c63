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

#ifndef CONTACTFLOW_APP_POLICY_HPP_
#define CONTACTFLOW_APP_POLICY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "app/config.hpp"
#include "context/context_encoder.hpp"
#include "context/tokenizer.hpp"
#include "flow/flow_head.hpp"
#include "moe/cross_scale_moe.hpp"
#include "sim/demonstrator.hpp"
#include "state/state_encoder.hpp"

namespace cf::app {

struct ModelSpec {
  context::ContextConfig context;
  std::size_t width = 32;
  std::size_t heads = 1;
  flow::FlowConfig flow;
  state::InjectionVariant injection = state::InjectionVariant::kStateFusion;
  moe::RoutingMode routing = moe::RoutingMode::kSoft;
  moe::AblationMask mask;
  bool force_prompt = true;
  bool multimodal_encoder = true;
  bool use_moe = true;
  std::size_t euler_steps = 10;
};

ModelSpec SpecFromConfig(const RunConfig& config, const context::Vocabulary& vocab,
                         const sim::VisualLayout& layout);

struct Observation {
  context::VisualObservation visual;
  context::PromptTokens prompts;
  state::ProprioState proprio;  // position already standardized
  geom::Wrench wrench{};
  double progress = 0.0;
};

// Standardization statistics fitted on the training set.
struct Normalizers {
  flow::Standardizer position = flow::Standardizer::Identity(3);
  flow::Standardizer action = flow::Standardizer::Identity(flow::kActionDim);
};

Observation MakeObservation(std::vector<nn::Matrix> cameras, const context::PromptTokens& prompts,
                            const geom::Pose7& pose, const geom::Wrench& wrench, double progress,
                            const Normalizers& norm);

// The full network: context encoder, state encoder with cross-modal
// conditioning, the cross-scale mixture (or a single MLP when disabled) and
// the flow-matching head.
class PolicyModel {
 public:
  static PolicyModel Create(nn::ParamSet& params, const ModelSpec& spec, nn::Rng& rng);

  const ModelSpec& spec() const noexcept { return spec_; }

  // E_MoE tokens. `raw_wrench` replaces the observation's wrench with a tape value.
  nn::Var Condition(nn::Tape& tape, const Observation& obs,
                    std::optional<nn::Var> raw_wrench = std::nullopt) const;

  // Flow-matching loss for one (observation, standardized chunk) pair.
  nn::Var Loss(nn::Tape& tape, const Observation& obs, std::span<const double> chunk,
               std::span<const double> noise, double tau,
               std::optional<nn::Var> raw_wrench = std::nullopt) const;

  // Standardized chunk integrated from `noise`.
  std::vector<double> Sample(const nn::ParamSet& params, const Observation& obs,
                             std::span<const double> noise) const;

  const context::ContextEncoder& context() const noexcept { return context_; }
  const state::StateEncoder& state() const noexcept { return state_; }
  const moe::CrossScaleMoe& moe() const noexcept { return moe_; }
  const flow::FlowHead& flow() const noexcept { return flow_; }

 private:
  ModelSpec spec_;
  context::ContextEncoder context_;
  state::StateEncoder state_;
  moe::CrossScaleMoe moe_;
  nn::Mlp fusion_;  // used instead of the mixture when it is disabled
  flow::FlowHead flow_;
};

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_POLICY_HPP_
