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

#ifndef CONTACTFLOW_NN_OPTIM_HPP_
#define CONTACTFLOW_NN_OPTIM_HPP_

#include <cstdint>

#include "nn/params.hpp"

namespace cf::nn {

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct OptimizerState {
  AdamWConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;

  static OptimizerState For(const ParamSet& params, AdamWConfig config = {});
};

// One bias-corrected AdamW update with decoupled weight decay:
//   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
// `learning_rate` overrides config.learning_rate (schedules pass it per step).
void AdamWStep(ParamSet& params, const Gradients& grads, OptimizerState& state,
               double learning_rate);
void AdamWStep(ParamSet& params, const Gradients& grads, OptimizerState& state);

// Half-cosine decay from `base` at step 0 to zero at `total`. Steps past the
// end clamp to the final value.
double CosineLr(std::uint64_t step, std::uint64_t total, double base);

// shadow <- decay * shadow + (1 - decay) * params
void EmaUpdate(ParamSet& shadow, const ParamSet& params, double decay);

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_OPTIM_HPP_
