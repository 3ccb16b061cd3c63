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

#ifndef CONTACTFLOW_SIM_DEMONSTRATOR_HPP_
#define CONTACTFLOW_SIM_DEMONSTRATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "context/tokenizer.hpp"
#include "data/trajectory.hpp"
#include "sim/contact_sim.hpp"
#include "transition/transition_model.hpp"

namespace cf::sim {

enum class TaskKind { kPress, kWipe, kProbe };

std::string_view TaskName(TaskKind task);
TaskKind ParseTask(std::string_view name);

// Prompts of every supported task, in TaskKind order.
std::vector<context::PromptBlock> DefaultPromptCorpus();

struct VisualLayout {
  std::size_t cameras = 2;
  std::size_t tokens = 3;
  std::size_t feature_dim = 8;
};

// Per-camera features of the tool-to-object offset through a fixed random
// projection (a stand-in for rendered images).
std::vector<nn::Matrix> RenderVisual(const geom::Vec3& object, const geom::Pose7& tool,
                                     const VisualLayout& layout);

struct TaskScene {
  TaskKind task = TaskKind::kPress;
  std::uint64_t seed = 0;
  geom::Vec3 object{};  // centre of the object's top face
  EnvParams env;
  geom::Pose7 start{};
  std::vector<transition::SubtaskTarget> targets;
  context::PromptBlock prompts;
};

TaskScene MakeScene(TaskKind task, std::uint64_t seed, const EnvParams& base = EnvParams{});

// Expected contact force on the tool for a commanded position.
double ExpectedForce(const TaskScene& scene, const geom::Vec3& commanded);

// Scripted expert command for `subtask` from the current state. Progress is
// left at zero; callers fill in the label.
flow::ActionVector ExpertAction(const TaskScene& scene, std::size_t subtask, const SimState& state);

// Tracks the task-specific success conditions over an episode.
class EpisodeMonitor {
 public:
  explicit EpisodeMonitor(const TaskScene& scene) : scene_(scene) {}
  void Observe(const SimState& state, const EnvParams& env);
  bool Success(const SimState& final_state, const EnvParams& env, std::size_t overloads) const;

 private:
  TaskScene scene_;
  double peak_near_ = 0.0;
  double peak_any_ = 0.0;
  double wipe_min_x_ = 1e9;
  double wipe_max_x_ = -1e9;
};

struct EpisodeConfig {
  transition::TransitionParams transition;
  double threshold = 0.9;
  std::size_t max_steps = 160;
  HybridGains gains;
  VisualLayout visual;
};

struct Demonstration {
  data::Trajectory trajectory;
  RolloutMetrics metrics;
};

// Runs the scripted expert with hybrid execution and records an annotated
// trajectory.
Demonstration RunDemonstration(const TaskScene& scene, const EpisodeConfig& config);

}  // namespace cf::sim

#endif  // CONTACTFLOW_SIM_DEMONSTRATOR_HPP_
