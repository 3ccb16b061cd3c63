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

#ifndef CONTACTFLOW_NN_TAPE_HPP_
#define CONTACTFLOW_NN_TAPE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "nn/matrix.hpp"
#include "nn/params.hpp"

namespace cf::nn {

struct Var {
  int id = -1;
  bool valid() const noexcept { return id >= 0; }
};

// Reverse-mode differentiation over a fixed set of matrix primitives.
//
// Each primitive records its value eagerly; Backward() walks the record in
// reverse creation order. Parameters are bound through the ParamSet passed at
// construction and appear as one leaf per tape no matter how often they are
// used, so gradients from every use accumulate in that leaf.
class Tape {
 public:
  explicit Tape(const ParamSet* params = nullptr, bool track_gradients = true);

  Var Constant(Matrix value);
  Var Input(Matrix value);
  Var Param(ParamId id);

  Var MatMul(Var a, Var b);
  Var MatMulTransB(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var AddRowBias(Var a, Var bias);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double s);
  Var Tanh(Var a);
  Var SoftmaxRows(Var a, bool causal = false);
  Var ConcatRows(std::span<const Var> parts);
  Var ConcatCols(std::span<const Var> parts);
  Var SliceRows(Var a, std::size_t begin, std::size_t end);
  Var SliceCols(Var a, std::size_t begin, std::size_t end);
  Var MeanRows(Var a);
  Var GatherRows(Var table, std::vector<std::size_t> rows);
  // Scales row r of `a` by weights(r, 0).
  Var ScaleRows(Var a, Var weights);
  Var Clamp(Var a, double lo, double hi);
  Var SumSquares(Var a);
  Var MeanAll(Var a);
  // One-hot of each row's argmax (lowest index wins ties). Not differentiable.
  Var OneHotArgmax(Var a);

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void Backward(Var loss);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Gradient of the last Backward() target; zeros when the node was unused.
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  Gradients ParamGradients() const;
  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  enum class Op {
    kLeaf, kMatMul, kMatMulTransB, kAdd, kSub, kAddRowBias, kMul, kScale,
    kTanh, kSoftmaxRows, kConcatRows, kConcatCols, kSliceRows, kSliceCols,
    kMeanRows, kGatherRows, kScaleRows, kClamp, kSumSquares, kMeanAll,
    kOneHotArgmax,
  };

  struct Node {
    Op op = Op::kLeaf;
    std::vector<int> inputs;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    double scalar_a = 0.0;
    double scalar_b = 0.0;
    std::size_t offset = 0;
    bool flag = false;
    std::vector<std::size_t> indices;
  };

  Var Push(Node node);
  bool AnyRequiresGrad(std::initializer_list<Var> vars) const;
  void Accumulate(int id, const Matrix& delta);
  void BackwardNode(const Node& node);

  const ParamSet* params_;
  bool track_;
  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;
};

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_TAPE_HPP_
