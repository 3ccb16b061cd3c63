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

#include "analysis/control_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "analysis/linalg.hpp"
#include "error.hpp"
#include "nn/rng.hpp"

namespace cf::analysis {

std::string_view ControlModeName(ControlMode mode) {
  return mode == ControlMode::kHybrid ? "hybrid" : "position_only";
}

nn::Matrix LinearizeEnv(const sim::EnvParams& env, const geom::Pose6& operating_point,
                        double step) {
  Require(step > 0.0, ErrorCode::kDomain, "difference step must be positive");
  const geom::Pose6 still{};
  nn::Matrix j(6, 6);
  for (std::size_t c = 0; c < 6; ++c) {
    geom::Pose6 up = operating_point;
    geom::Pose6 down = operating_point;
    up[c] += step;
    down[c] -= step;
    const geom::Wrench fu = sim::EnvForce(up, still, env);
    const geom::Wrench fd = sim::EnvForce(down, still, env);
    for (std::size_t r = 0; r < 6; ++r) j(r, c) = (fu[r] - fd[r]) / (2.0 * step);
  }
  return j;
}

LinearSystem BuildSystem(const nn::Matrix& jacobian, ControlMode mode, double authority) {
  Require(jacobian.rows() == 6 && jacobian.cols() == 6, ErrorCode::kDimension,
          "contact Jacobian must be 6x6");
  LinearSystem sys;
  sys.mode = mode;
  sys.a = nn::Matrix(kStateDim, kStateDim);
  const std::size_t inputs = mode == ControlMode::kHybrid ? 12 : 6;
  sys.b = nn::Matrix(kStateDim, inputs);
  for (std::size_t i = 0; i < 6; ++i) {
    sys.b(i, i) = 1.0;
    for (std::size_t c = 0; c < 6; ++c) sys.b(6 + i, c) = jacobian(i, c);
    if (mode == ControlMode::kHybrid) sys.b(6 + i, 6 + i) = authority;
  }
  return sys;
}

nn::Matrix ControllabilityMatrix(const LinearSystem& sys) {
  Require(sys.a.rows() == kStateDim && sys.a.cols() == kStateDim, ErrorCode::kDimension,
          "A must be 12x12");
  Require(sys.b.rows() == kStateDim && sys.b.cols() > 0, ErrorCode::kDimension,
          "B must have 12 rows");
  std::vector<nn::Matrix> blocks;
  blocks.reserve(kHorizonPowers);
  nn::Matrix term = sys.b;
  for (std::size_t k = 0; k < kHorizonPowers; ++k) {
    blocks.push_back(term);
    term = nn::MatMul(sys.a, term);
  }
  return nn::ConcatCols(blocks);
}

double ControllabilityIndex(std::size_t reachable_dim, std::size_t task_dim) {
  Require(task_dim > 0, ErrorCode::kDomain, "task dimension must be positive");
  Require(reachable_dim <= task_dim, ErrorCode::kDomain,
          "reachable dimension exceeds the task dimension");
  return static_cast<double>(reachable_dim) / static_cast<double>(task_dim);
}

ControllabilityReport Analyze(const LinearSystem& sys) {
  ControllabilityReport r;
  r.controllability = ControllabilityMatrix(sys);
  r.singular_values = SingularValues(r.controllability);
  const double tol = DefaultRankTolerance(r.controllability, r.singular_values);
  for (double s : r.singular_values)
    if (s > tol) ++r.rank;
  r.kappa = ControllabilityIndex(r.rank, kStateDim);
  return r;
}

ReachableEstimate ReachableDimEstimate(const sim::EnvParams& env, ControlMode mode,
                                       const geom::Pose6& operating_point, std::size_t samples,
                                       std::uint64_t seed) {
  Require(samples >= 100, ErrorCode::kDomain, "reachable-set estimate needs at least 100 samples");
  env.Validate();
  nn::Rng rng(seed);
  const geom::Vec3 origin{operating_point[0], operating_point[1], operating_point[2]};
  // Stay on the same side of the contact boundary as the operating point.
  const double gap = std::abs(geom::Dot(origin, env.normal) - env.surface_height);
  const double dz = gap > 0.0 ? std::min(0.01, 0.5 * gap) : 0.01;
  nn::Matrix pairs(samples, kStateDim);
  for (std::size_t i = 0; i < samples; ++i) {
    geom::Pose6 target = operating_point;
    for (std::size_t c = 0; c < 2; ++c) target[c] += rng.Uniform(-0.05, 0.05);
    target[2] += rng.Uniform(-dz, dz);
    for (std::size_t c = 3; c < 6; ++c) target[c] += rng.Uniform(-0.2, 0.2);
    // Commanding the same target twice settles the velocity to zero.
    sim::SimState state = sim::MakeState(geom::ToPose7(target), env);
    state = sim::StepPositionOnly(state, geom::ToPose7(target), env);
    geom::Wrench f = state.wrench;
    if (mode == ControlMode::kHybrid)
      for (std::size_t c = 0; c < 6; ++c) f[c] += rng.Uniform(-10.0, 10.0);
    for (std::size_t c = 0; c < 6; ++c) {
      pairs(i, c) = state.pose[c];
      pairs(i, 6 + c) = f[c];
    }
  }
  for (std::size_t c = 0; c < kStateDim; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < samples; ++i) mean += pairs(i, c);
    mean /= static_cast<double>(samples);
    for (std::size_t i = 0; i < samples; ++i) pairs(i, c) -= mean;
  }
  ReachableEstimate est;
  est.singular_values = SingularValues(pairs);
  const double top = est.singular_values.front();
  if (top == 0.0) return est;
  for (double s : est.singular_values)
    if (s > 1e-6 * top) ++est.dimension;
  est.tail_ratio =
      est.dimension < est.singular_values.size() ? est.singular_values[est.dimension] / top : 0.0;
  return est;
}

}  // namespace cf::analysis
