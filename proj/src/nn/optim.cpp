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

#include "nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace cf::nn {

OptimizerState OptimizerState::For(const ParamSet& params, AdamWConfig config) {
  OptimizerState s;
  s.config = config;
  s.first_moment = params.ZerosLike();
  s.second_moment = params.ZerosLike();
  return s;
}

void AdamWStep(ParamSet& params, const Gradients& grads, OptimizerState& state) {
  AdamWStep(params, grads, state, state.config.learning_rate);
}

void AdamWStep(ParamSet& params, const Gradients& grads, OptimizerState& state,
               double learning_rate) {
  Require(learning_rate >= 0.0, ErrorCode::kDomain, "negative learning rate");
  Require(grads.size() == params.size() && state.first_moment.size() == params.size(),
          ErrorCode::kDimension, "optimizer state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Require(grads[i].SameShape(params.value(i)), ErrorCode::kDimension,
            "gradient shape mismatch for '" + params.name(i) + "'");
    Require(grads[i].AllFinite(), ErrorCode::kNumeric,
            "non-finite gradient for '" + params.name(i) + "'");
  }
  const auto& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params.mutable_value(i).values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    const auto g = grads[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= learning_rate * (m_hat / (std::sqrt(v_hat) + c.epsilon) + c.weight_decay * p[j]);
    }
  }
}

double CosineLr(std::uint64_t step, std::uint64_t total, double base) {
  Require(total > 0, ErrorCode::kDomain, "cosine schedule needs a positive total");
  const double progress =
      static_cast<double>(std::min(step, total)) / static_cast<double>(total);
  return 0.5 * base * (1.0 + std::cos(std::numbers::pi * progress));
}

void EmaUpdate(ParamSet& shadow, const ParamSet& params, double decay) {
  Require(decay >= 0.0 && decay < 1.0, ErrorCode::kDomain, "EMA decay outside [0, 1)");
  Require(shadow.SameLayout(params), ErrorCode::kDimension,
          "EMA shadow does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto s = shadow.mutable_value(i).values();
    const auto p = params.value(i).values();
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = decay * s[j] + (1.0 - decay) * p[j];
  }
}

}  // namespace cf::nn
