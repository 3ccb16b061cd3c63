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

#ifndef CONTACTFLOW_ANALYSIS_CONTROL_ANALYSIS_HPP_
#define CONTACTFLOW_ANALYSIS_CONTROL_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nn/matrix.hpp"
#include "sim/contact_sim.hpp"

namespace cf::analysis {

inline constexpr std::size_t kStateDim = 12;  // pose (6) + wrench (6)
inline constexpr std::size_t kHorizonPowers = 12;

enum class ControlMode { kPositionOnly, kHybrid };

std::string_view ControlModeName(ControlMode mode);

// d wrench / d pose at a static operating point, by central differences.
nn::Matrix LinearizeEnv(const sim::EnvParams& env, const geom::Pose6& operating_point,
                        double step = 1e-6);

struct LinearSystem {
  nn::Matrix a;
  nn::Matrix b;
  ControlMode mode = ControlMode::kPositionOnly;
};

// position-only: A = 0, B = [I; J]. hybrid: A = 0, B = [[I, 0], [J, authority I]].
LinearSystem BuildSystem(const nn::Matrix& jacobian, ControlMode mode, double authority = 1.0);

// [B, AB, ..., A^11 B].
nn::Matrix ControllabilityMatrix(const LinearSystem& sys);

double ControllabilityIndex(std::size_t reachable_dim, std::size_t task_dim);

struct ControllabilityReport {
  nn::Matrix controllability;
  std::vector<double> singular_values;
  std::size_t rank = 0;
  double kappa = 0.0;
};

ControllabilityReport Analyze(const LinearSystem& sys);

struct ReachableEstimate {
  std::size_t dimension = 0;
  std::vector<double> singular_values;
  // First singular value past the estimated dimension over the largest.
  double tail_ratio = 0.0;
};

// Samples admissible commands around `operating_point`, records (pose, wrench)
// pairs, centres them and counts singular values above 1e-6 sigma_max.
ReachableEstimate ReachableDimEstimate(const sim::EnvParams& env, ControlMode mode,
                                       const geom::Pose6& operating_point, std::size_t samples,
                                       std::uint64_t seed);

}  // namespace cf::analysis

#endif  // CONTACTFLOW_ANALYSIS_CONTROL_ANALYSIS_HPP_
