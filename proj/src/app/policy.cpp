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

#include "app/policy.hpp"

#include <algorithm>
#include <array>

#include "error.hpp"

namespace cf::app {

ModelSpec SpecFromConfig(const RunConfig& config, const context::Vocabulary& vocab,
                         const sim::VisualLayout& layout) {
  config.Validate();
  ModelSpec s;
  s.width = config.width;
  s.heads = config.heads;
  s.injection = state::ParseInjectionVariant(config.injection);
  s.routing = moe::ParseRoutingMode(config.moe_mode);
  s.mask = {config.moe_visual, config.moe_force};
  s.force_prompt = config.force_prompt;
  s.multimodal_encoder = config.multimodal_encoder;
  s.use_moe = config.use_moe;
  s.euler_steps = config.euler_steps;

  s.context.visual_feature_dim = layout.feature_dim;
  s.context.visual_tokens = layout.cameras * layout.tokens;
  s.context.task_tokens = vocab.task_length();
  s.context.force_tokens = vocab.force_length();
  s.context.vocab_size = vocab.size();
  s.context.width = config.width;
  s.context.blocks = config.blocks;
  s.context.heads = config.heads;
  s.context.causal = config.causal;
  const bool force_in_context =
      s.multimodal_encoder && state::ApplyInjectionVariant(s.injection).force_in_context;
  s.context.extra_tokens = force_in_context ? 1 : 0;

  s.flow.horizon = config.chunk;
  s.flow.cond_width = config.width;
  s.flow.hidden = config.flow_hidden;
  s.flow.hidden_layers = config.flow_layers;
  s.flow.time_features = config.time_features;
  s.flow.condition_on_progress = config.condition_on_progress;
  return s;
}

Observation MakeObservation(std::vector<nn::Matrix> cameras, const context::PromptTokens& prompts,
                            const geom::Pose7& pose, const geom::Wrench& wrench, double progress,
                            const Normalizers& norm) {
  Observation obs;
  obs.visual.cameras = std::move(cameras);
  obs.prompts = prompts;
  obs.proprio.pose = pose;
  obs.proprio.Validate();
  const auto p = norm.position.Apply(std::span<const double>(pose.data(), 3));
  std::copy(p.begin(), p.end(), obs.proprio.pose.begin());
  obs.wrench = wrench;
  obs.progress = progress;
  return obs;
}

PolicyModel PolicyModel::Create(nn::ParamSet& params, const ModelSpec& spec, nn::Rng& rng) {
  PolicyModel m;
  m.spec_ = spec;
  m.context_ = context::ContextEncoder::Create(params, spec.context, rng);
  m.state_ = state::StateEncoder::Create(params, spec.width, spec.heads, rng);
  if (spec.use_moe) {
    m.moe_ = moe::CrossScaleMoe::Create(params, spec.width, rng);
  } else {
    const std::array<std::size_t, 3> widths{spec.width, 4 * spec.width, spec.width};
    m.fusion_ = nn::Mlp::Create(params, "fusion", widths, rng);
  }
  m.flow_ = flow::FlowHead::Create(params, spec.flow, rng);
  return m;
}

nn::Var PolicyModel::Condition(nn::Tape& tape, const Observation& obs,
                               std::optional<nn::Var> raw_wrench) const {
  context::PromptTokens prompts = obs.prompts;
  if (!spec_.force_prompt)
    std::fill(prompts.force.begin(), prompts.force.end(), context::Vocabulary::kPad);

  const state::InjectionWiring wiring =
      spec_.multimodal_encoder ? state::ApplyInjectionVariant(spec_.injection)
                               : state::InjectionWiring{};
  const bool bypass = spec_.use_moe && wiring.bypass;
  std::optional<nn::Var> force_token;
  if (wiring.force_in_context || wiring.force_state_token || bypass) {
    nn::Var w = raw_wrench ? *raw_wrench : tape.Constant(nn::Matrix::RowVector(obs.wrench));
    force_token = state_.EncodeForce(tape, w);
  }

  nn::Var context = context_.Encode(
      tape, obs.visual, prompts,
      wiring.force_in_context ? force_token : std::optional<nn::Var>{});
  nn::Var pose = state_.EncodePose(tape, obs.proprio);
  nn::Var state_tokens = pose;
  if (spec_.multimodal_encoder) {
    if (wiring.force_state_token) {
      const std::array<nn::Var, 2> parts{pose, *force_token};
      state_tokens = tape.ConcatRows(parts);
    }
    state_tokens = state_.CrossModalCondition(tape, state_tokens, context);
  }
  const state::ConditionedSequence seq = state::AssembleCondition(
      tape, context, state_tokens, bypass ? force_token : std::optional<nn::Var>{});
  if (spec_.use_moe) return moe_.Forward(tape, seq, spec_.mask, spec_.routing);
  return fusion_.Apply(tape, seq.tokens);
}

nn::Var PolicyModel::Loss(nn::Tape& tape, const Observation& obs, std::span<const double> chunk,
                          std::span<const double> noise, double tau,
                          std::optional<nn::Var> raw_wrench) const {
  const flow::FlowSample sample = flow::FlowTrainTarget(chunk, noise, tau);
  nn::Var pooled = flow_.Pool(tape, Condition(tape, obs, raw_wrench));
  std::optional<double> progress;
  if (spec_.flow.condition_on_progress) progress = obs.progress;
  nn::Var predicted = flow_.Velocity(
      tape, tape.Constant(nn::Matrix::RowVector(sample.interpolant)), tau, pooled, progress);
  return flow::FlowMatchingLoss(tape, predicted,
                                tape.Constant(nn::Matrix::RowVector(sample.velocity)));
}

std::vector<double> PolicyModel::Sample(const nn::ParamSet& params, const Observation& obs,
                                        std::span<const double> noise) const {
  nn::Tape tape(&params, false);
  const nn::Matrix pooled = tape.value(flow_.Pool(tape, Condition(tape, obs)));
  std::optional<double> progress;
  if (spec_.flow.condition_on_progress) progress = obs.progress;
  return flow_.Sample(params, pooled, noise, spec_.euler_steps, progress);
}

}  // namespace cf::app
