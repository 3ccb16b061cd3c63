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

#ifndef CONTACTFLOW_DATA_SEGMENTATION_HPP_
#define CONTACTFLOW_DATA_SEGMENTATION_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "data/trajectory.hpp"

namespace cf::data {

struct SegmentationRules {
  std::size_t window = 30;
  double wipe_position = 0.05;  // m
  double wipe_force = 10.0;     // N
  double push_z = 0.05;
  double push_force_z = 5.0;
  double grasp_z = 0.1;
  double grasp_force = 5.0;
  double rotate_axis_force = 1.0;
};

struct WindowFeatures {
  double position_change = 0.0;  // largest per-axis range
  double z_change = 0.0;
  double force_amplitude = 0.0;  // range of the force norm
  double z_force_amplitude = 0.0;
  std::array<double, 3> axis_force_change{};
};

WindowFeatures ComputeFeatures(std::span<const geom::Pose7> poses,
                               std::span<const geom::Wrench> wrenches);

// Wipe, then Push, then Grasp, then Rotate; Explore when no rule fires.
SkillLabel ClassifyWindow(const WindowFeatures& f, const SegmentationRules& rules = {});

// One label per consecutive window (the last one may be shorter).
std::vector<SkillLabel> SegmentSkills(const Trajectory& t, const SegmentationRules& rules = {});

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_SEGMENTATION_HPP_
