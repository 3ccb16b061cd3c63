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

#ifndef CONTACTFLOW_DATA_SYNCHRONIZE_HPP_
#define CONTACTFLOW_DATA_SYNCHRONIZE_HPP_

#include <cstddef>
#include <vector>

#include "state/geometry.hpp"

namespace cf::data {

struct WrenchStream {
  std::vector<double> times;  // seconds, strictly increasing
  std::vector<geom::Wrench> samples;
};

struct PoseStream {
  std::vector<double> times;
  std::vector<geom::Pose7> samples;
};

struct SyncOptions {
  // Uncovered spans longer than this many frame periods are rejected.
  double max_gap_periods = 3.0;
};

struct SyncResult {
  std::vector<double> times;
  std::vector<geom::Wrench> wrenches;  // mean over [t_k, t_{k+1})
  std::vector<geom::Pose7> poses;      // nearest within half a period
};

// Resamples the wrench (and optional pose) streams onto the frame timeline.
// Throws kGap naming the first uncovered interval that is too long.
SyncResult SynchronizeStreams(const WrenchStream& wrench, const std::vector<double>& frame_times,
                              const PoseStream* poses = nullptr, const SyncOptions& options = {});

// Trapezoidal integral of one wrench component.
double TrapezoidIntegral(const WrenchStream& wrench, std::size_t component);
// Sum over frames of the window mean times the window length.
double WindowedIntegral(const SyncResult& sync, std::size_t component, double last_period);

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_SYNCHRONIZE_HPP_
