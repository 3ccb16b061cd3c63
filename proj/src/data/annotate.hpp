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

#ifndef CONTACTFLOW_DATA_ANNOTATE_HPP_
#define CONTACTFLOW_DATA_ANNOTATE_HPP_

#include <vector>

#include "data/trajectory.hpp"
#include "transition/transition_model.hpp"

namespace cf::data {

// Target per subtask: the stored targets when present, otherwise the pose at
// the end of each segment. Fallback targets are scored against the global
// force bounds from the transition parameters.
std::vector<transition::SubtaskTarget> SubtaskTargets(const Trajectory& t);

// Ground-truth progress of every step towards its subtask's target.
// Throws kAnnotation when the trajectory carries no subtask boundaries.
std::vector<double> AnnotateTransitions(const Trajectory& t,
                                        const transition::TransitionParams& params = {});

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_ANNOTATE_HPP_
