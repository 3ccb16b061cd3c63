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

#ifndef CONTACTFLOW_FLOW_FLOW_HEAD_HPP_
#define CONTACTFLOW_FLOW_FLOW_HEAD_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nn/layers.hpp"
#include "state/geometry.hpp"

namespace cf::flow {

inline constexpr std::size_t kActionDim = 14;
inline constexpr std::size_t kProgressIndex = 13;

// Hybrid command: pose delta (position + quaternion), target wrench, progress.
struct ActionVector {
  geom::Pose7 pose_delta{0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  geom::Wrench wrench{};
  double progress = 0.0;
};

std::array<double, kActionDim> PackAction(const ActionVector& action);
// Progress clamped to [0, 1]; quaternion part renormalized (zero -> identity).
ActionVector DecomposeAction(std::span<const double> raw);

std::vector<double> SampleNoise(std::size_t dims, nn::Rng& rng);

struct FlowSample {
  std::vector<double> noise;
  double tau = 0.0;
  std::vector<double> interpolant;
  std::vector<double> velocity;
};

// Linear path from noise (tau = 0) to the action (tau = 1).
FlowSample FlowTrainTarget(std::span<const double> action, std::span<const double> noise,
                           double tau);

using VelocityField = std::function<std::vector<double>(std::span<const double> a, double tau)>;

// a <- a + (1/N) F(a, tau) for tau = 0, 1/N, ..., 1 - 1/N.
std::vector<double> EulerIntegrate(std::span<const double> start, std::size_t steps,
                                   const VelocityField& field);

// Sinusoidal features of the denoising time.
std::vector<double> TimeFeatures(double tau, std::size_t count);

// Per-dimension standardization with statistics from the training set.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Identity(std::size_t dims);
  // Rows of `samples` are observations. A dimension with zero spread gets scale 0:
  // Apply only centres it and Invert returns the fitted constant.
  static Standardizer Fit(std::span<const std::vector<double>> samples);
  std::size_t dims() const noexcept { return mean.size(); }
  std::vector<double> Apply(std::span<const double> x) const;
  std::vector<double> Invert(std::span<const double> z) const;
};

struct FlowConfig {
  std::size_t horizon = 30;
  std::size_t cond_width = 64;
  std::size_t hidden = 128;
  std::size_t hidden_layers = 2;
  std::size_t time_features = 16;
  bool condition_on_progress = false;
  bool zero_last = false;

  std::size_t chunk_dims() const { return horizon * kActionDim; }
};

class FlowHead {
 public:
  static FlowHead Create(nn::ParamSet& params, const FlowConfig& config, nn::Rng& rng);

  const FlowConfig& config() const noexcept { return config_; }

  // [mean of projected tokens, learned-query attention readout], 1 x 2D.
  nn::Var Pool(nn::Tape& tape, nn::Var moe_tokens) const;
  // F(a_tau, tau, pooled), 1 x chunk_dims.
  nn::Var Velocity(nn::Tape& tape, nn::Var a_tau, double tau, nn::Var pooled,
                   std::optional<double> progress = std::nullopt) const;

  // Integrates from `noise` with a fixed pooled conditioning (no gradients).
  std::vector<double> Sample(const nn::ParamSet& params, const nn::Matrix& pooled,
                             std::span<const double> noise, std::size_t steps,
                             std::optional<double> progress = std::nullopt) const;

  const nn::Linear& context_proj() const noexcept { return context_proj_; }
  nn::ParamId readout_query() const noexcept { return readout_query_; }
  const nn::Mlp& velocity_mlp() const noexcept { return velocity_; }

 private:
  FlowConfig config_;
  nn::Linear context_proj_;
  nn::ParamId readout_query_ = 0;
  nn::Mlp velocity_;
};

// Mean squared error between predicted and target velocity.
nn::Var FlowMatchingLoss(nn::Tape& tape, nn::Var predicted, nn::Var target);

}  // namespace cf::flow

#endif  // CONTACTFLOW_FLOW_FLOW_HEAD_HPP_
