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

#ifndef CONTACTFLOW_NN_LAYERS_HPP_
#define CONTACTFLOW_NN_LAYERS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nn/matrix.hpp"
#include "nn/params.hpp"
#include "nn/rng.hpp"
#include "nn/tape.hpp"

namespace cf::nn {

// Plain evaluation of the kernel primitives. These are the reference
// semantics; the tape versions below must agree with them.
Matrix LinearForward(const Matrix& weight, const Matrix& bias, const Matrix& input);
std::vector<double> Softmax(std::span<const double> logits);
Matrix ScaledDotAttention(const Matrix& queries, const Matrix& keys,
                          const Matrix& values, bool causal = false);

enum class Activation { kTanh, kIdentity };

struct Linear {
  ParamId weight = 0;
  ParamId bias = 0;
  std::size_t in = 0;
  std::size_t out = 0;

  static Linear Create(ParamSet& params, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng, bool zero_init = false);
  Var Apply(Tape& tape, Var x) const;
  Matrix Eval(const ParamSet& params, const Matrix& x) const;
};

// Linear layers with the hidden activation between them (none after the last).
struct Mlp {
  std::vector<Linear> layers;
  Activation hidden = Activation::kTanh;

  // widths = {in, h1, ..., out}
  static Mlp Create(ParamSet& params, const std::string& name,
                    std::span<const std::size_t> widths, Rng& rng,
                    bool zero_last = false);
  Var Apply(Tape& tape, Var x) const;
  Matrix Eval(const ParamSet& params, const Matrix& x) const;
};

Matrix MlpForward(const ParamSet& params, const Mlp& mlp, const Matrix& input);

// softmax(Q K^T / sqrt(d)) V on the tape.
Var Attend(Tape& tape, Var queries, Var keys, Var values, bool causal = false);

// Projected multi-head attention with an output projection. Queries come from
// `x`, keys and values from `context` (self-attention when they coincide).
struct AttentionLayer {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  std::size_t heads = 1;
  bool causal = false;

  static AttentionLayer Create(ParamSet& params, const std::string& name,
                               std::size_t width, std::size_t heads, Rng& rng,
                               bool zero_output = false);
  Var Apply(Tape& tape, Var x, Var context) const;
};

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_LAYERS_HPP_
