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

#ifndef CONTACTFLOW_APP_CONFIG_HPP_
#define CONTACTFLOW_APP_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cf::app {

// Everything a run needs. Text form: one `key = value` per line, '#' comments.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string task = "press";

  // Data.
  std::size_t demos = 200;
  std::string data_dir = "data";

  // Training.
  std::size_t batch = 32;
  std::size_t steps = 5000;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double ema = 0.99;
  std::size_t log_every = 1;

  // Model.
  std::size_t width = 32;
  std::size_t heads = 2;
  std::size_t blocks = 2;
  std::size_t chunk = 30;
  std::size_t flow_hidden = 128;
  std::size_t flow_layers = 2;
  std::size_t time_features = 16;
  std::size_t euler_steps = 10;
  std::string moe_mode = "soft";
  std::string injection = "state_fusion";
  bool moe_visual = true;
  bool moe_force = true;
  bool force_prompt = true;
  bool multimodal_encoder = true;
  bool use_moe = true;
  bool condition_on_progress = false;
  bool causal = false;

  // Transition labels.
  double alpha = 2.0;
  double rate = 2.0;
  double force_lower = 0.0;
  double force_upper = 100.0;
  double threshold = 0.9;

  // Environment and execution.
  double stiffness = 1000.0;
  double damping = 5.0;
  double friction = 0.2;
  double force_limit = 100.0;
  double admittance = 5e-4;
  std::size_t max_steps = 160;
  std::size_t episodes = 50;
  bool perturb = false;
  std::size_t jobs = 1;

  void Validate() const;
};

struct SeedRef {
  std::uint64_t* value;
};

using FieldRef = std::variant<SeedRef, std::size_t*, double*, bool*, std::string*>;

struct ConfigField {
  std::string_view key;
  FieldRef ref;
};

std::vector<ConfigField> ConfigFields(RunConfig& config);

// Applies `key = value` lines on top of `base`. Unknown keys are usage errors.
RunConfig ParseConfig(std::string_view text, RunConfig base = {});
RunConfig LoadConfig(const std::string& path, RunConfig base = {});
std::string FormatConfig(const RunConfig& config);
void SetConfigValue(RunConfig& config, std::string_view key, std::string_view value);

// FOCA_SEED, when set, replaces the configured seed.
void ApplyEnvironmentOverrides(RunConfig& config);

// Full-scale training schedule (30k steps, batch 32, seed 42).
void ApplyFullScale(RunConfig& config);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_CONFIG_HPP_
