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

#include "data/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "data/trajectory_io.hpp"
#include "error.hpp"
#include "state/state_encoder.hpp"

namespace cf::data {

namespace {

constexpr const char* kAxisNames[6] = {"fx", "fy", "fz", "tx", "ty", "tz"};

std::string Number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::size_t DatasetReport::HistogramBin(double normalized) const {
  const double u = (std::clamp(normalized, -1.0, 1.0) + 1.0) * 0.5;
  return std::min(kHistogramBins - 1, static_cast<std::size_t>(u * kHistogramBins));
}

std::array<double, kSkillCount> DatasetReport::SkillFractions() const {
  std::array<double, kSkillCount> out{};
  std::size_t total = 0;
  for (std::size_t c : skills) total += c;
  if (total == 0) return out;
  for (std::size_t i = 0; i < kSkillCount; ++i)
    out[i] = static_cast<double>(skills[i]) / static_cast<double>(total);
  return out;
}

void AccumulateTrajectory(DatasetReport& report, const Trajectory& t,
                          const SegmentationRules& rules) {
  for (const geom::Wrench& w : t.wrenches) {
    const auto n = state::NormalizeWrench(w);
    for (std::size_t a = 0; a < 6; ++a) ++report.histograms[a][report.HistogramBin(n[a])];
  }
  const auto labels = t.skills.empty() ? SegmentSkills(t, rules) : t.skills;
  for (SkillLabel s : labels) ++report.skills[static_cast<std::size_t>(s)];
  TaskCounts& tc = report.tasks[t.task];
  ++tc.trajectories;
  tc.steps += t.size();
}

DatasetReport DatasetStats(const std::vector<std::string>& paths, const SegmentationRules& rules) {
  Require(!paths.empty(), ErrorCode::kMissingData, "no trajectories given");
  DatasetReport report;
  for (const std::string& path : paths) {
    try {
      AccumulateTrajectory(report, ReadTrajectory(path), rules);
    } catch (const Error& e) {
      report.unreadable.emplace_back(path, std::string(ErrorCodeName(e.code())) + ": " + e.what());
    }
  }
  return report;
}

std::string FormatStatsCsv(const DatasetReport& report) {
  std::ostringstream out;
  out << "kind,name,index,value\n";
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < kHistogramBins; ++b)
      out << "histogram," << kAxisNames[a] << ',' << b << ',' << report.histograms[a][b] << '\n';
  const auto fractions = report.SkillFractions();
  for (std::size_t i = 0; i < kSkillCount; ++i)
    out << "skill," << SkillName(static_cast<SkillLabel>(i)) << ',' << report.skills[i] << ','
        << Number(fractions[i]) << '\n';
  for (const auto& [task, counts] : report.tasks) {
    out << "task_trajectories," << task << ",," << counts.trajectories << '\n';
    out << "task_steps," << task << ",," << counts.steps << '\n';
  }
  for (const auto& [path, reason] : report.unreadable) {
    std::string clean = reason;
    std::replace(clean.begin(), clean.end(), ',', ';');
    out << "unreadable," << path << ",," << clean << '\n';
  }
  return out.str();
}

}  // namespace cf::data
