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

#ifndef CONTACTFLOW_APP_CHECKPOINT_HPP_
#define CONTACTFLOW_APP_CHECKPOINT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "app/config.hpp"
#include "app/policy.hpp"
#include "context/tokenizer.hpp"
#include "nn/optim.hpp"

namespace cf::app {

inline constexpr std::string_view kCheckpointMagic = "contactflow-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  std::vector<context::PromptBlock> corpus;
  Normalizers normalizers;
  nn::ParamSet params;
  std::optional<nn::OptimizerState> optimizer;
  // Averaged weights kept alongside so a resumed run continues the average.
  std::optional<nn::ParamSet> ema;
  std::uint64_t step = 0;
};

// Text manifest (config, corpus, normalizers, parameter layout, checksum), a
// blank line, then raw little-endian doubles in parameter order followed by
// the optimizer moments and averaged weights when present.
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(std::string_view bytes);
void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

// Throws kIncompatible when a model-shaping key differs.
void CheckCompatible(const RunConfig& checkpoint, const RunConfig& requested);

// A model rebuilt from a checkpoint with its parameter values restored.
struct LoadedPolicy {
  Checkpoint checkpoint;
  context::Vocabulary vocab;
  sim::VisualLayout layout;
  PolicyModel model;
};

LoadedPolicy RestorePolicy(Checkpoint ckpt);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_CHECKPOINT_HPP_
