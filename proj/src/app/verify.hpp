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

#ifndef CONTACTFLOW_APP_VERIFY_HPP_
#define CONTACTFLOW_APP_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "data/trajectory.hpp"
#include "nn/rng.hpp"

namespace cf::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Deliberate defects used to confirm that a check can fail.
struct FaultInjection {
  bool transition_constant = false;  // wrong Gamma constant in the closed form
};

CheckResult CheckTransitionOracle(std::size_t observations, std::size_t samples,
                                  std::uint64_t seed, const FaultInjection& fault = {});
CheckResult CheckGammaIdentity(std::size_t inputs_per_alpha, std::uint64_t seed);
CheckResult CheckPipelineGradients(std::size_t instances, std::uint64_t seed);
CheckResult CheckMoeContracts(std::size_t tokens, std::uint64_t seed);
CheckResult CheckFlowSampler();
CheckResult CheckControllability(std::size_t samples, std::uint64_t seed);
CheckResult CheckHybridTracking();
CheckResult CheckSegmentationSuite();
CheckResult CheckTrajectoryRoundTrip(std::size_t count, std::uint64_t seed);
CheckResult CheckSynchronization(std::uint64_t seed);
CheckResult CheckTransitionLabels(std::size_t demos, std::size_t samples, std::uint64_t seed);
CheckResult CheckCheckpointRoundTrip(std::uint64_t seed);

// A trajectory with random shapes and values (including awkward doubles).
data::Trajectory RandomTrajectory(nn::Rng& rng);

struct VerifyOptions {
  std::vector<std::string> only;  // empty: every check
  FaultInjection fault;
  std::uint64_t seed = 42;
};

std::vector<std::string> VerifyCheckNames();
std::vector<CheckResult> RunVerify(const VerifyOptions& options);
// One "PASS name (detail)" or "FAIL name: detail" line per check.
std::string FormatVerifyReport(const std::vector<CheckResult>& results);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_VERIFY_HPP_
