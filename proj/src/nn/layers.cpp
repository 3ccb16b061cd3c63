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

#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace cf::nn {

Matrix LinearForward(const Matrix& weight, const Matrix& bias, const Matrix& input) {
  Require(input.cols() == weight.rows(), ErrorCode::kDimension,
          "linear input " + input.ShapeString() + " vs weight " + weight.ShapeString());
  Require(bias.rows() == 1 && bias.cols() == weight.cols(), ErrorCode::kDimension,
          "linear bias " + bias.ShapeString());
  Matrix out = MatMul(input, weight);
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bias(0, c);
  return out;
}

std::vector<double> Softmax(std::span<const double> logits) {
  Require(!logits.empty(), ErrorCode::kDomain, "softmax of an empty vector");
  for (double v : logits)
    Require(std::isfinite(v), ErrorCode::kNumeric, "softmax logit is not finite");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

Matrix ScaledDotAttention(const Matrix& queries, const Matrix& keys,
                          const Matrix& values, bool causal) {
  Require(keys.rows() > 0, ErrorCode::kDomain, "attention over zero tokens");
  Require(queries.cols() == keys.cols(), ErrorCode::kDimension,
          "queries and keys disagree on feature width");
  Require(keys.rows() == values.rows(), ErrorCode::kDimension,
          "keys and values disagree on token count");
  const double scale = 1.0 / std::sqrt(static_cast<double>(queries.cols()));
  Matrix scores = MatMulTransB(queries, keys);
  Matrix out(queries.rows(), values.cols());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const std::size_t limit = causal ? std::min(r + 1, keys.rows()) : keys.rows();
    std::vector<double> logits(limit);
    for (std::size_t c = 0; c < limit; ++c) logits[c] = scores(r, c) * scale;
    const auto w = Softmax(logits);
    for (std::size_t c = 0; c < limit; ++c)
      for (std::size_t j = 0; j < values.cols(); ++j) out(r, j) += w[c] * values(c, j);
  }
  return out;
}

Linear Linear::Create(ParamSet& params, const std::string& name, std::size_t in,
                      std::size_t out, Rng& rng, bool zero_init) {
  Linear l;
  l.in = in;
  l.out = out;
  l.weight = params.Add(name + ".w", zero_init ? Matrix(in, out) : UniformInit(in, out, in, rng));
  l.bias = params.Add(name + ".b", zero_init ? Matrix(1, out) : UniformInit(1, out, in, rng));
  return l;
}

Var Linear::Apply(Tape& tape, Var x) const {
  Require(tape.value(x).cols() == in, ErrorCode::kDimension,
          "linear layer expects width " + std::to_string(in) + ", got " +
              tape.value(x).ShapeString());
  return tape.AddRowBias(tape.MatMul(x, tape.Param(weight)), tape.Param(bias));
}

Matrix Linear::Eval(const ParamSet& params, const Matrix& x) const {
  return LinearForward(params.value(weight), params.value(bias), x);
}

Mlp Mlp::Create(ParamSet& params, const std::string& name,
                std::span<const std::size_t> widths, Rng& rng, bool zero_last) {
  Require(widths.size() >= 2, ErrorCode::kDimension, "mlp needs at least one layer");
  Mlp m;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    m.layers.push_back(Linear::Create(params, name + "." + std::to_string(i), widths[i],
                                      widths[i + 1], rng, last && zero_last));
  }
  return m;
}

Var Mlp::Apply(Tape& tape, Var x) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    x = layers[i].Apply(tape, x);
    if (i + 1 < layers.size() && hidden == Activation::kTanh) x = tape.Tanh(x);
  }
  return x;
}

Matrix Mlp::Eval(const ParamSet& params, const Matrix& x) const {
  return MlpForward(params, *this, x);
}

Matrix MlpForward(const ParamSet& params, const Mlp& mlp, const Matrix& input) {
  Matrix x = input;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    x = mlp.layers[i].Eval(params, x);
    if (i + 1 < mlp.layers.size() && mlp.hidden == Activation::kTanh)
      for (double& v : x.values()) v = std::tanh(v);
  }
  return x;
}

Var Attend(Tape& tape, Var queries, Var keys, Var values, bool causal) {
  const Matrix& k = tape.value(keys);
  Require(k.rows() > 0, ErrorCode::kDomain, "attention over zero tokens");
  Require(tape.value(queries).cols() == k.cols(), ErrorCode::kDimension,
          "queries and keys disagree on feature width");
  Require(k.rows() == tape.value(values).rows(), ErrorCode::kDimension,
          "keys and values disagree on token count");
  const double scale = 1.0 / std::sqrt(static_cast<double>(k.cols()));
  Var scores = tape.Scale(tape.MatMulTransB(queries, keys), scale);
  return tape.MatMul(tape.SoftmaxRows(scores, causal), values);
}

AttentionLayer AttentionLayer::Create(ParamSet& params, const std::string& name,
                                      std::size_t width, std::size_t heads, Rng& rng,
                                      bool zero_output) {
  Require(heads > 0 && width % heads == 0, ErrorCode::kDimension,
          "attention width must divide evenly across heads");
  AttentionLayer a;
  a.query = Linear::Create(params, name + ".q", width, width, rng);
  a.key = Linear::Create(params, name + ".k", width, width, rng);
  a.value = Linear::Create(params, name + ".v", width, width, rng);
  a.output = Linear::Create(params, name + ".o", width, width, rng, zero_output);
  a.heads = heads;
  return a;
}

Var AttentionLayer::Apply(Tape& tape, Var x, Var context) const {
  Var q = query.Apply(tape, x);
  Var k = key.Apply(tape, context);
  Var v = value.Apply(tape, context);
  Var mixed;
  if (heads == 1) {
    mixed = Attend(tape, q, k, v, causal);
  } else {
    const std::size_t width = tape.value(q).cols() / heads;
    std::vector<Var> parts;
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t b = h * width;
      parts.push_back(Attend(tape, tape.SliceCols(q, b, b + width),
                             tape.SliceCols(k, b, b + width),
                             tape.SliceCols(v, b, b + width), causal));
    }
    mixed = tape.ConcatCols(parts);
  }
  return output.Apply(tape, mixed);
}

}  // namespace cf::nn
