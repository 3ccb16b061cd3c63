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

#include "context/subtask_plan.hpp"

#include "error.hpp"

namespace cf::context {

SubtaskPlan SubtaskPlan::FromBlock(const PromptBlock& block,
                                   std::vector<std::string> subtask_ids) {
  SubtaskPlan plan;
  plan.force_prompts = block.force_prompts;
  plan.subtasks = subtask_ids.empty() ? block.force_prompts : std::move(subtask_ids);
  plan.Validate();
  return plan;
}

void SubtaskPlan::Validate() const {
  Require(!subtasks.empty(), ErrorCode::kDomain, "subtask plan is empty");
  Require(subtasks.size() == force_prompts.size(), ErrorCode::kDomain,
          "subtask plan needs one force prompt per subtask");
  Require(index < subtasks.size(), ErrorCode::kDomain, "subtask index out of range");
}

SubtaskPlan AdvanceSubtask(SubtaskPlan plan) {
  plan.Validate();
  if (!plan.terminal()) ++plan.index;
  return plan;
}

std::vector<std::size_t> RenderForcePrompt(const SubtaskPlan& plan, const Vocabulary& vocab) {
  plan.Validate();
  return vocab.EncodeForce(plan.current_prompt());
}

}  // namespace cf::context
