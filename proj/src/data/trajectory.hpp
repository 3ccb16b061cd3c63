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

#ifndef CONTACTFLOW_DATA_TRAJECTORY_HPP_
#define CONTACTFLOW_DATA_TRAJECTORY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flow/flow_head.hpp"
#include "nn/matrix.hpp"
#include "state/geometry.hpp"
#include "transition/transition_model.hpp"

namespace cf::data {

enum class SkillLabel : std::uint8_t { kWipe = 0, kPush, kGrasp, kRotate, kExplore };
inline constexpr std::size_t kSkillCount = 5;

std::string_view SkillName(SkillLabel s);

using Action = std::array<double, flow::kActionDim>;

// One episode on the common 30 Hz timeline.
struct Trajectory {
  std::string task;
  std::uint64_t seed = 0;
  geom::Vec3 object{};
  std::string task_prompt;

  std::vector<double> timestamps;
  // One matrix per camera: steps x (camera_tokens * feature_dim).
  std::vector<nn::Matrix> cameras;
  std::size_t camera_tokens = 0;
  std::vector<geom::Pose7> poses;
  std::vector<geom::Wrench> wrenches;
  std::vector<Action> actions;
  std::vector<double> progress;

  // First step of each subtask segment, with its force prompt and target.
  std::vector<std::size_t> boundaries;
  std::vector<std::string> subtask_prompts;
  std::vector<transition::SubtaskTarget> targets;

  std::vector<SkillLabel> skills;

  std::size_t size() const noexcept { return timestamps.size(); }
  std::size_t feature_dim() const;
  // Subtask whose segment contains `step`.
  std::size_t SubtaskAt(std::size_t step) const;
  // Feature grid seen by every camera at `step`.
  std::vector<nn::Matrix> VisualAt(std::size_t step) const;

  // Throws kDomain on an empty trajectory, mismatched lengths, non-increasing
  // timestamps or unsorted boundaries.
  void Validate() const;
};

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_TRAJECTORY_HPP_
