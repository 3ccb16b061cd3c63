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

#ifndef CONTACTFLOW_DATA_STATS_HPP_
#define CONTACTFLOW_DATA_STATS_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "data/segmentation.hpp"

namespace cf::data {

inline constexpr std::size_t kHistogramBins = 50;

struct TaskCounts {
  std::size_t trajectories = 0;
  std::size_t steps = 0;
};

struct DatasetReport {
  // Per axis (fx, fy, fz, tx, ty, tz), counts over normalized [-1, 1].
  std::array<std::array<std::size_t, kHistogramBins>, 6> histograms{};
  std::array<std::size_t, kSkillCount> skills{};
  std::map<std::string, TaskCounts> tasks;
  std::vector<std::pair<std::string, std::string>> unreadable;  // path, reason

  std::size_t HistogramBin(double normalized) const;
  std::array<double, kSkillCount> SkillFractions() const;
};

void AccumulateTrajectory(DatasetReport& report, const Trajectory& t,
                          const SegmentationRules& rules = {});
// Unreadable files are recorded and skipped.
DatasetReport DatasetStats(const std::vector<std::string>& paths,
                           const SegmentationRules& rules = {});
// Columns: kind,name,index,value.
std::string FormatStatsCsv(const DatasetReport& report);

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_STATS_HPP_
