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

#include "context/context_encoder.hpp"

#include <array>
#include <string>

#include "error.hpp"

namespace cf::context {

void VisualObservation::Validate(std::size_t feature_dim) const {
  Require(!cameras.empty(), ErrorCode::kDomain, "visual observation has no cameras");
  for (const auto& cam : cameras) {
    Require(cam.rows() > 0, ErrorCode::kDomain, "camera grid has no tokens");
    Require(cam.cols() == feature_dim, ErrorCode::kDimension,
            "camera feature width " + std::to_string(cam.cols()) + " != " +
                std::to_string(feature_dim));
    Require(cam.AllFinite(), ErrorCode::kNumeric, "camera features are not finite");
  }
}

std::size_t VisualObservation::token_count() const {
  std::size_t n = 0;
  for (const auto& cam : cameras) n += cam.rows();
  return n;
}

nn::Matrix VisualObservation::Stacked() const { return nn::ConcatRows(cameras); }

ContextEncoder ContextEncoder::Create(nn::ParamSet& params, const ContextConfig& config,
                                      nn::Rng& rng, bool zero_residual) {
  ContextEncoder e;
  e.config_ = config;
  const std::size_t d = config.width;
  e.visual_proj_ = nn::Linear::Create(params, "ctx.visual", config.visual_feature_dim, d, rng);
  e.embedding_ = params.Add("ctx.embed", nn::UniformInit(config.vocab_size, d, d, rng));
  e.text_proj_ = nn::Linear::Create(params, "ctx.text", d, d, rng);
  if (config.positional)
    e.positional_ = params.Add("ctx.pos", nn::UniformInit(config.total_tokens(), d, d, rng));
  for (std::size_t b = 0; b < config.blocks; ++b) {
    const std::string name = "ctx.block" + std::to_string(b);
    Block block;
    block.attention =
        nn::AttentionLayer::Create(params, name + ".attn", d, config.heads, rng, zero_residual);
    block.attention.causal = config.causal;
    const std::array<std::size_t, 3> widths{d, config.mlp_ratio * d, d};
    block.mlp = nn::Mlp::Create(params, name + ".mlp", widths, rng, zero_residual);
    e.blocks_.push_back(std::move(block));
  }
  return e;
}

nn::Var ContextEncoder::EncodeVisual(nn::Tape& tape, const VisualObservation& obs) const {
  obs.Validate(config_.visual_feature_dim);
  return visual_proj_.Apply(tape, tape.Constant(obs.Stacked()));
}

nn::Var ContextEncoder::EncodeText(nn::Tape& tape, const PromptTokens& prompts) const {
  Require(prompts.vocab_size == config_.vocab_size, ErrorCode::kDimension,
          "prompt vocabulary does not match the encoder");
  prompts.Validate();
  std::vector<std::size_t> ids = prompts.task;
  ids.insert(ids.end(), prompts.force.begin(), prompts.force.end());
  nn::Var tokens = tape.GatherRows(tape.Param(embedding_), std::move(ids));
  return text_proj_.Apply(tape, tokens);
}

nn::Var ContextEncoder::Fuse(nn::Tape& tape, nn::Var visual, nn::Var text,
                             std::optional<nn::Var> extra) const {
  Require(tape.value(visual).cols() == tape.value(text).cols(), ErrorCode::kDimension,
          "visual and text tokens disagree on width");
  std::vector<nn::Var> parts{visual, text};
  if (extra) {
    Require(tape.value(*extra).cols() == tape.value(visual).cols(), ErrorCode::kDimension,
            "extra fused token has the wrong width");
    parts.push_back(*extra);
  }
  nn::Var x = tape.ConcatRows(parts);
  const std::size_t n = tape.value(x).rows();
  if (positional_) {
    Require(n <= config_.total_tokens(), ErrorCode::kDimension,
            "more fused tokens than positional codes");
    x = tape.Add(x, tape.SliceRows(tape.Param(*positional_), 0, n));
  }
  for (const auto& block : blocks_) {
    x = tape.Add(x, block.attention.Apply(tape, x, x));
    x = tape.Add(x, block.mlp.Apply(tape, x));
  }
  return x;
}

nn::Var ContextEncoder::Encode(nn::Tape& tape, const VisualObservation& obs,
                               const PromptTokens& prompts, std::optional<nn::Var> extra) const {
  return Fuse(tape, EncodeVisual(tape, obs), EncodeText(tape, prompts), extra);
}

}  // namespace cf::context
