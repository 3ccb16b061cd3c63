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

#include "data/annotate.hpp"

#include "error.hpp"

namespace cf::data {

std::vector<transition::SubtaskTarget> SubtaskTargets(const Trajectory& t) {
  Require(!t.boundaries.empty() && t.boundaries.front() == 0, ErrorCode::kAnnotation,
          "trajectory has no subtask boundaries starting at step 0");
  if (!t.targets.empty()) {
    Require(t.targets.size() == t.boundaries.size(), ErrorCode::kAnnotation,
            "subtask targets and boundaries disagree");
    return t.targets;
  }
  std::vector<transition::SubtaskTarget> out;
  for (std::size_t k = 0; k < t.boundaries.size(); ++k) {
    const std::size_t last = k + 1 < t.boundaries.size() ? t.boundaries[k + 1] - 1 : t.size() - 1;
    out.push_back({t.poses.at(last), std::nullopt});
  }
  return out;
}

std::vector<double> AnnotateTransitions(const Trajectory& t,
                                        const transition::TransitionParams& params) {
  Require(t.size() > 0, ErrorCode::kAnnotation, "cannot annotate an empty trajectory");
  const auto targets = SubtaskTargets(t);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    transition::SubtaskTarget target = targets[t.SubtaskAt(i)];
    if (t.targets.empty()) target.force = params.force;
    out[i] = transition::SubtaskProgress(t.poses[i], t.wrenches[i], target, params);
  }
  return out;
}

}  // namespace cf::data
