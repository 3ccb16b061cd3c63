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

#include "data/synchronize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "error.hpp"

namespace cf::data {

namespace {

void CheckTimeline(const std::vector<double>& t, const char* what) {
  Require(!t.empty(), ErrorCode::kDomain, std::string(what) + " stream is empty");
  for (std::size_t i = 0; i < t.size(); ++i)
    Require(std::isfinite(t[i]) && (i == 0 || t[i] > t[i - 1]), ErrorCode::kDomain,
            std::string(what) + " timestamps must be strictly increasing");
}

std::string Interval(double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.6f, %.6f] s", a, b);
  return buf;
}

double FramePeriod(const std::vector<double>& frames) {
  if (frames.size() < 2) return 0.0;
  return (frames.back() - frames.front()) / static_cast<double>(frames.size() - 1);
}

}  // namespace

SyncResult SynchronizeStreams(const WrenchStream& wrench, const std::vector<double>& frame_times,
                              const PoseStream* poses, const SyncOptions& options) {
  CheckTimeline(wrench.times, "wrench");
  CheckTimeline(frame_times, "frame");
  Require(wrench.samples.size() == wrench.times.size(), ErrorCode::kDimension,
          "wrench samples and timestamps differ in length");
  const double period = FramePeriod(frame_times);
  Require(period > 0.0, ErrorCode::kDomain, "need at least two frames to define a period");
  const double limit = options.max_gap_periods * period;
  const double start = frame_times.front();
  const double end = frame_times.back() + period;

  // Uncovered spans: before the first sample, between samples, after the last.
  auto check_gap = [&](double a, double b) {
    const double lo = std::max(a, start);
    const double hi = std::min(b, end);
    Require(!(hi - lo > limit), ErrorCode::kGap, "wrench stream gap " + Interval(lo, hi));
  };
  check_gap(start, wrench.times.front());
  for (std::size_t i = 1; i < wrench.times.size(); ++i)
    check_gap(wrench.times[i - 1], wrench.times[i]);
  check_gap(wrench.times.back(), end);

  SyncResult out;
  out.times = frame_times;
  out.wrenches.resize(frame_times.size());
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < frame_times.size(); ++k) {
    const double lo = frame_times[k];
    const double hi = k + 1 < frame_times.size() ? frame_times[k + 1] : lo + period;
    while (cursor < wrench.times.size() && wrench.times[cursor] < lo) ++cursor;
    geom::Wrench acc{};
    std::size_t count = 0;
    for (std::size_t i = cursor; i < wrench.times.size() && wrench.times[i] < hi; ++i, ++count)
      for (std::size_t c = 0; c < 6; ++c) acc[c] += wrench.samples[i][c];
    if (count == 0) {
      // Short hole inside the tolerance: fall back to the nearest sample.
      const auto it = std::lower_bound(wrench.times.begin(), wrench.times.end(), 0.5 * (lo + hi));
      std::size_t j = static_cast<std::size_t>(it - wrench.times.begin());
      if (j == wrench.times.size() ||
          (j > 0 && 0.5 * (lo + hi) - wrench.times[j - 1] < wrench.times[j] - 0.5 * (lo + hi)))
        --j;
      out.wrenches[k] = wrench.samples[j];
    } else {
      for (std::size_t c = 0; c < 6; ++c) out.wrenches[k][c] = acc[c] / static_cast<double>(count);
    }
  }

  if (poses) {
    CheckTimeline(poses->times, "pose");
    Require(poses->samples.size() == poses->times.size(), ErrorCode::kDimension,
            "pose samples and timestamps differ in length");
    out.poses.resize(frame_times.size());
    for (std::size_t k = 0; k < frame_times.size(); ++k) {
      const double t = frame_times[k];
      const auto it = std::lower_bound(poses->times.begin(), poses->times.end(), t);
      std::size_t j = static_cast<std::size_t>(it - poses->times.begin());
      if (j == poses->times.size() || (j > 0 && t - poses->times[j - 1] <= poses->times[j] - t))
        --j;
      Require(std::abs(poses->times[j] - t) <= 0.5 * period, ErrorCode::kGap,
              "no pose sample within half a frame period of " + Interval(t, t));
      out.poses[k] = poses->samples[j];
    }
  }
  return out;
}

double TrapezoidIntegral(const WrenchStream& wrench, std::size_t component) {
  Require(component < 6, ErrorCode::kDomain, "wrench component out of range");
  double sum = 0.0;
  for (std::size_t i = 1; i < wrench.times.size(); ++i)
    sum += 0.5 * (wrench.samples[i][component] + wrench.samples[i - 1][component]) *
           (wrench.times[i] - wrench.times[i - 1]);
  return sum;
}

double WindowedIntegral(const SyncResult& sync, std::size_t component, double last_period) {
  Require(component < 6, ErrorCode::kDomain, "wrench component out of range");
  double sum = 0.0;
  for (std::size_t k = 0; k < sync.times.size(); ++k) {
    const double len =
        k + 1 < sync.times.size() ? sync.times[k + 1] - sync.times[k] : last_period;
    sum += sync.wrenches[k][component] * len;
  }
  return sum;
}

}  // namespace cf::data
