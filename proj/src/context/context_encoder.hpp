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

#ifndef CONTACTFLOW_CONTEXT_CONTEXT_ENCODER_HPP_
#define CONTACTFLOW_CONTEXT_CONTEXT_ENCODER_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "context/tokenizer.hpp"
#include "nn/layers.hpp"

namespace cf::context {

// Per-camera feature grids; each camera contributes tokens x feature_dim.
struct VisualObservation {
  std::vector<nn::Matrix> cameras;

  void Validate(std::size_t feature_dim) const;
  std::size_t token_count() const;
  nn::Matrix Stacked() const;
};

struct ContextConfig {
  std::size_t visual_feature_dim = 8;
  std::size_t visual_tokens = 6;
  std::size_t task_tokens = 4;
  std::size_t force_tokens = 4;
  std::size_t vocab_size = 32;
  std::size_t width = 64;
  std::size_t blocks = 2;
  std::size_t heads = 1;
  std::size_t mlp_ratio = 4;
  bool causal = false;
  bool positional = true;
  // Extra fused tokens appended after the prompts (the force token when force
  // is injected through the vision-language pathway).
  std::size_t extra_tokens = 0;

  std::size_t total_tokens() const {
    return visual_tokens + task_tokens + force_tokens + extra_tokens;
  }
};

// Stand-in for the pretrained vision-language stack: a visual projection, a
// token embedding with a text projection, and a few residual transformer
// blocks over the concatenated sequence [Z_v; Z_l].
class ContextEncoder {
 public:
  struct Block {
    nn::AttentionLayer attention;
    nn::Mlp mlp;
  };

  static ContextEncoder Create(nn::ParamSet& params, const ContextConfig& config,
                               nn::Rng& rng, bool zero_residual = false);

  const ContextConfig& config() const noexcept { return config_; }

  nn::Var EncodeVisual(nn::Tape& tape, const VisualObservation& obs) const;
  nn::Var EncodeText(nn::Tape& tape, const PromptTokens& prompts) const;
  nn::Var Fuse(nn::Tape& tape, nn::Var visual, nn::Var text,
               std::optional<nn::Var> extra = std::nullopt) const;
  nn::Var Encode(nn::Tape& tape, const VisualObservation& obs, const PromptTokens& prompts,
                 std::optional<nn::Var> extra = std::nullopt) const;

  // Layer handles, exposed for reference evaluations in tests.
  const nn::Linear& visual_proj() const noexcept { return visual_proj_; }
  const nn::Linear& text_proj() const noexcept { return text_proj_; }
  nn::ParamId embedding() const noexcept { return embedding_; }
  std::optional<nn::ParamId> positional() const noexcept { return positional_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

 private:
  ContextConfig config_;
  nn::Linear visual_proj_;
  nn::ParamId embedding_ = 0;
  nn::Linear text_proj_;
  std::optional<nn::ParamId> positional_;
  std::vector<Block> blocks_;
};

}  // namespace cf::context

#endif  // CONTACTFLOW_CONTEXT_CONTEXT_ENCODER_HPP_
