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

#include "data/segmentation.hpp"

#include <algorithm>
#include <limits>

#include "error.hpp"

namespace cf::data {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi >= lo ? hi - lo : 0.0; }
};

}  // namespace

WindowFeatures ComputeFeatures(std::span<const geom::Pose7> poses,
                               std::span<const geom::Wrench> wrenches) {
  Require(poses.size() == wrenches.size(), ErrorCode::kDimension,
          "window poses and wrenches differ in length");
  std::array<Range, 3> pos;
  std::array<Range, 3> force;
  Range norm;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      pos[a].Add(poses[i][a]);
      force[a].Add(wrenches[i][a]);
    }
    norm.Add(geom::Norm(geom::ForcePart(wrenches[i])));
  }
  WindowFeatures f;
  for (std::size_t a = 0; a < 3; ++a) {
    f.position_change = std::max(f.position_change, pos[a].span());
    f.axis_force_change[a] = force[a].span();
  }
  f.z_change = pos[2].span();
  f.force_amplitude = norm.span();
  f.z_force_amplitude = force[2].span();
  return f;
}

SkillLabel ClassifyWindow(const WindowFeatures& f, const SegmentationRules& r) {
  if (f.position_change > r.wipe_position && f.force_amplitude > r.wipe_force)
    return SkillLabel::kWipe;
  if (f.z_change > r.push_z && f.z_force_amplitude > r.push_force_z) return SkillLabel::kPush;
  if (f.z_change > r.grasp_z && f.force_amplitude > r.grasp_force) return SkillLabel::kGrasp;
  if (std::all_of(f.axis_force_change.begin(), f.axis_force_change.end(),
                  [&](double c) { return c > r.rotate_axis_force; }))
    return SkillLabel::kRotate;
  return SkillLabel::kExplore;
}

std::vector<SkillLabel> SegmentSkills(const Trajectory& t, const SegmentationRules& rules) {
  Require(rules.window >= 2, ErrorCode::kDomain, "segmentation window must be at least 2 steps");
  Require(t.poses.size() == t.wrenches.size(), ErrorCode::kDimension,
          "trajectory poses and wrenches differ in length");
  std::vector<SkillLabel> labels;
  for (std::size_t begin = 0; begin < t.poses.size(); begin += rules.window) {
    const std::size_t len = std::min(rules.window, t.poses.size() - begin);
    labels.push_back(ClassifyWindow(
        ComputeFeatures(std::span(t.poses).subspan(begin, len),
                        std::span(t.wrenches).subspan(begin, len)),
        rules));
  }
  return labels;
}

}  // namespace cf::data
