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

#ifndef CONTACTFLOW_CONTEXT_SUBTASK_PLAN_HPP_
#define CONTACTFLOW_CONTEXT_SUBTASK_PLAN_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "context/tokenizer.hpp"

namespace cf::context {

// Discrete force-prompt state machine: one entry per subtask, advanced one
// step at a time. The final subtask is absorbing.
struct SubtaskPlan {
  std::vector<std::string> subtasks;
  std::vector<std::string> force_prompts;
  std::size_t index = 0;

  static SubtaskPlan FromBlock(const PromptBlock& block,
                               std::vector<std::string> subtask_ids = {});
  void Validate() const;
  std::size_t size() const noexcept { return subtasks.size(); }
  bool terminal() const noexcept { return index + 1 >= subtasks.size(); }
  const std::string& current_prompt() const { return force_prompts.at(index); }
};

SubtaskPlan AdvanceSubtask(SubtaskPlan plan);
std::vector<std::size_t> RenderForcePrompt(const SubtaskPlan& plan, const Vocabulary& vocab);

}  // namespace cf::context

#endif  // CONTACTFLOW_CONTEXT_SUBTASK_PLAN_HPP_
