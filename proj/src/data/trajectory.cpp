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

#include "data/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace cf::data {

std::string_view SkillName(SkillLabel s) {
  switch (s) {
    case SkillLabel::kWipe: return "Wipe";
    case SkillLabel::kPush: return "Push";
    case SkillLabel::kGrasp: return "Grasp";
    case SkillLabel::kRotate: return "Rotate";
    case SkillLabel::kExplore: return "Explore";
  }
  return "Explore";
}

std::size_t Trajectory::feature_dim() const {
  if (cameras.empty() || camera_tokens == 0) return 0;
  return cameras.front().cols() / camera_tokens;
}

std::size_t Trajectory::SubtaskAt(std::size_t step) const {
  Require(!boundaries.empty(), ErrorCode::kAnnotation, "trajectory has no subtask boundaries");
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), step);
  return it == boundaries.begin() ? 0 : static_cast<std::size_t>(it - boundaries.begin()) - 1;
}

std::vector<nn::Matrix> Trajectory::VisualAt(std::size_t step) const {
  Require(step < size(), ErrorCode::kDomain, "step out of range");
  const std::size_t fd = feature_dim();
  std::vector<nn::Matrix> out;
  out.reserve(cameras.size());
  for (const nn::Matrix& cam : cameras) {
    nn::Matrix grid(camera_tokens, fd);
    const auto row = cam.row(step);
    std::copy(row.begin(), row.end(), grid.values().begin());
    out.push_back(std::move(grid));
  }
  return out;
}

void Trajectory::Validate() const {
  const std::size_t n = size();
  Require(n > 0, ErrorCode::kDomain, "trajectory has no steps");
  Require(poses.size() == n && wrenches.size() == n && actions.size() == n &&
              progress.size() == n,
          ErrorCode::kDomain, "per-step streams disagree on length");
  for (std::size_t i = 0; i < n; ++i)
    Require(std::isfinite(timestamps[i]) && (i == 0 || timestamps[i] > timestamps[i - 1]),
            ErrorCode::kDomain, "timestamps must be strictly increasing");
  for (const nn::Matrix& cam : cameras) {
    Require(cam.rows() == n, ErrorCode::kDomain, "camera stream length differs from timeline");
    Require(camera_tokens > 0 && cam.cols() % camera_tokens == 0 &&
                cam.cols() == cameras.front().cols(),
            ErrorCode::kDomain, "camera feature layout is inconsistent");
  }
  Require(std::is_sorted(boundaries.begin(), boundaries.end()), ErrorCode::kDomain,
          "subtask boundaries are not sorted");
  Require(boundaries.empty() || boundaries.back() < n, ErrorCode::kDomain,
          "subtask boundary beyond the last step");
  Require(subtask_prompts.size() == boundaries.size(), ErrorCode::kDomain,
          "one prompt per subtask boundary is required");
  Require(targets.empty() || targets.size() == boundaries.size(), ErrorCode::kDomain,
          "one target per subtask boundary is required");
}

}  // namespace cf::data
