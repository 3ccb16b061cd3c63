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

#include "nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace cf::nn {

Tape::Tape(const ParamSet* params, bool track_gradients)
    : params_(params), track_(track_gradients) {
  if (params_ != nullptr) param_nodes_.assign(params_->size(), -1);
}

Var Tape::Push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

bool Tape::AnyRequiresGrad(std::initializer_list<Var> vars) const {
  if (!track_) return false;
  for (Var v : vars)
    if (nodes_.at(v.id).requires_grad) return true;
  return false;
}

Var Tape::Constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::Input(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = track_;
  return Push(std::move(n));
}

Var Tape::Param(ParamId id) {
  Require(params_ != nullptr, ErrorCode::kDomain, "tape has no parameter set");
  int& slot = param_nodes_.at(id);
  if (slot < 0) {
    Node n;
    n.value = params_->value(id);
    n.requires_grad = track_;
    slot = Push(std::move(n)).id;
  }
  return Var{slot};
}

Var Tape::MatMul(Var a, Var b) {
  Node n;
  n.op = Op::kMatMul;
  n.inputs = {a.id, b.id};
  n.value = nn::MatMul(value(a), value(b));
  n.requires_grad = AnyRequiresGrad({a, b});
  return Push(std::move(n));
}

Var Tape::MatMulTransB(Var a, Var b) {
  Node n;
  n.op = Op::kMatMulTransB;
  n.inputs = {a.id, b.id};
  n.value = nn::MatMulTransB(value(a), value(b));
  n.requires_grad = AnyRequiresGrad({a, b});
  return Push(std::move(n));
}

Var Tape::Add(Var a, Var b) {
  Require(value(a).SameShape(value(b)), ErrorCode::kDimension,
          "add " + value(a).ShapeString() + " + " + value(b).ShapeString());
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  const auto& bv = value(b).values();
  auto out = n.value.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  n.requires_grad = AnyRequiresGrad({a, b});
  return Push(std::move(n));
}

Var Tape::Sub(Var a, Var b) {
  Require(value(a).SameShape(value(b)), ErrorCode::kDimension,
          "sub " + value(a).ShapeString() + " - " + value(b).ShapeString());
  Node n;
  n.op = Op::kSub;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  const auto& bv = value(b).values();
  auto out = n.value.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  n.requires_grad = AnyRequiresGrad({a, b});
  return Push(std::move(n));
}

Var Tape::AddRowBias(Var a, Var bias) {
  const Matrix& av = value(a);
  const Matrix& bv = value(bias);
  Require(bv.rows() == 1 && bv.cols() == av.cols(), ErrorCode::kDimension,
          "bias " + bv.ShapeString() + " does not broadcast over " + av.ShapeString());
  Node n;
  n.op = Op::kAddRowBias;
  n.inputs = {a.id, bias.id};
  n.value = av;
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto row = n.value.row(r);
    for (std::size_t c = 0; c < av.cols(); ++c) row[c] += bv(0, c);
  }
  n.requires_grad = AnyRequiresGrad({a, bias});
  return Push(std::move(n));
}

Var Tape::Mul(Var a, Var b) {
  Require(value(a).SameShape(value(b)), ErrorCode::kDimension, "elementwise mul shape");
  Node n;
  n.op = Op::kMul;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  const auto& bv = value(b).values();
  auto out = n.value.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  n.requires_grad = AnyRequiresGrad({a, b});
  return Push(std::move(n));
}

Var Tape::Scale(Var a, double s) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a.id};
  n.scalar_a = s;
  n.value = value(a);
  for (double& v : n.value.values()) v *= s;
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::Tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {a.id};
  n.value = value(a);
  for (double& v : n.value.values()) v = std::tanh(v);
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::SoftmaxRows(Var a, bool causal) {
  const Matrix& av = value(a);
  Require(av.cols() > 0, ErrorCode::kDomain, "softmax over zero columns");
  Node n;
  n.op = Op::kSoftmaxRows;
  n.inputs = {a.id};
  n.flag = causal;
  n.value = Matrix(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    const std::size_t limit = causal ? std::min(r + 1, av.cols()) : av.cols();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < limit; ++c) mx = std::max(mx, av(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < limit; ++c) {
      const double e = std::exp(av(r, c) - mx);
      n.value(r, c) = e;
      sum += e;
    }
    for (std::size_t c = 0; c < limit; ++c) n.value(r, c) /= sum;
  }
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::ConcatRows(std::span<const Var> parts) {
  Require(!parts.empty(), ErrorCode::kDimension, "concatenating zero blocks");
  std::vector<Matrix> values;
  values.reserve(parts.size());
  Node n;
  n.op = Op::kConcatRows;
  for (Var p : parts) {
    values.push_back(value(p));
    n.inputs.push_back(p.id);
    n.requires_grad = n.requires_grad || (track_ && nodes_[p.id].requires_grad);
  }
  n.value = nn::ConcatRows(values);
  return Push(std::move(n));
}

Var Tape::ConcatCols(std::span<const Var> parts) {
  Require(!parts.empty(), ErrorCode::kDimension, "concatenating zero blocks");
  std::vector<Matrix> values;
  values.reserve(parts.size());
  Node n;
  n.op = Op::kConcatCols;
  for (Var p : parts) {
    values.push_back(value(p));
    n.inputs.push_back(p.id);
    n.requires_grad = n.requires_grad || (track_ && nodes_[p.id].requires_grad);
  }
  n.value = nn::ConcatCols(values);
  return Push(std::move(n));
}

Var Tape::SliceRows(Var a, std::size_t begin, std::size_t end) {
  Node n;
  n.op = Op::kSliceRows;
  n.inputs = {a.id};
  n.offset = begin;
  n.value = nn::SliceRows(value(a), begin, end);
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::SliceCols(Var a, std::size_t begin, std::size_t end) {
  const Matrix& av = value(a);
  Require(begin <= end && end <= av.cols(), ErrorCode::kDimension,
          "column slice out of range");
  Node n;
  n.op = Op::kSliceCols;
  n.inputs = {a.id};
  n.offset = begin;
  n.value = Matrix(av.rows(), end - begin);
  for (std::size_t r = 0; r < av.rows(); ++r)
    std::copy(av.row(r).begin() + begin, av.row(r).begin() + end, n.value.row(r).begin());
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::MeanRows(Var a) {
  const Matrix& av = value(a);
  Require(av.rows() > 0, ErrorCode::kDomain, "mean over zero rows");
  Node n;
  n.op = Op::kMeanRows;
  n.inputs = {a.id};
  n.value = Matrix(1, av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) n.value(0, c) += av(r, c);
  for (double& v : n.value.values()) v /= static_cast<double>(av.rows());
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::GatherRows(Var table, std::vector<std::size_t> rows) {
  const Matrix& tv = value(table);
  Node n;
  n.op = Op::kGatherRows;
  n.inputs = {table.id};
  n.value = Matrix(rows.size(), tv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Require(rows[i] < tv.rows(), ErrorCode::kDomain,
            "row index " + std::to_string(rows[i]) + " outside table of " +
                std::to_string(tv.rows()));
    std::copy(tv.row(rows[i]).begin(), tv.row(rows[i]).end(), n.value.row(i).begin());
  }
  n.indices = std::move(rows);
  n.requires_grad = AnyRequiresGrad({table});
  return Push(std::move(n));
}

Var Tape::ScaleRows(Var a, Var weights) {
  const Matrix& av = value(a);
  const Matrix& wv = value(weights);
  Require(wv.rows() == av.rows() && wv.cols() == 1, ErrorCode::kDimension,
          "row weights " + wv.ShapeString() + " for " + av.ShapeString());
  Node n;
  n.op = Op::kScaleRows;
  n.inputs = {a.id, weights.id};
  n.value = av;
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (double& v : n.value.row(r)) v *= wv(r, 0);
  n.requires_grad = AnyRequiresGrad({a, weights});
  return Push(std::move(n));
}

Var Tape::Clamp(Var a, double lo, double hi) {
  Node n;
  n.op = Op::kClamp;
  n.inputs = {a.id};
  n.scalar_a = lo;
  n.scalar_b = hi;
  n.value = value(a);
  for (double& v : n.value.values()) v = std::clamp(v, lo, hi);
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::SumSquares(Var a) {
  Node n;
  n.op = Op::kSumSquares;
  n.inputs = {a.id};
  double s = 0.0;
  for (double v : value(a).values()) s += v * v;
  n.value = Matrix(1, 1, s);
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::MeanAll(Var a) {
  const Matrix& av = value(a);
  Require(av.size() > 0, ErrorCode::kDomain, "mean of empty matrix");
  Node n;
  n.op = Op::kMeanAll;
  n.inputs = {a.id};
  double s = 0.0;
  for (double v : av.values()) s += v;
  n.value = Matrix(1, 1, s / static_cast<double>(av.size()));
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

Var Tape::OneHotArgmax(Var a) {
  const Matrix& av = value(a);
  Node n;
  n.op = Op::kOneHotArgmax;
  n.inputs = {a.id};
  n.value = Matrix(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < av.cols(); ++c)
      if (av(r, c) > av(r, best)) best = c;
    if (av.cols() > 0) n.value(r, best) = 1.0;
  }
  n.requires_grad = AnyRequiresGrad({a});
  return Push(std::move(n));
}

void Tape::Accumulate(int id, const Matrix& delta) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.empty()) {
    node.grad = delta;
    return;
  }
  auto g = node.grad.values();
  const auto d = delta.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += d[i];
}

Matrix Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id);
  if (node.grad.empty()) return Matrix(node.value.rows(), node.value.cols());
  return node.grad;
}

Gradients Tape::ParamGradients() const {
  Require(params_ != nullptr, ErrorCode::kDomain, "tape has no parameter set");
  Gradients out = params_->ZerosLike();
  for (std::size_t i = 0; i < param_nodes_.size(); ++i)
    if (param_nodes_[i] >= 0 && !nodes_[param_nodes_[i]].grad.empty())
      out[i] = nodes_[param_nodes_[i]].grad;
  return out;
}

void Tape::Backward(Var loss) {
  Require(track_, ErrorCode::kCapability, "tape was built without gradient tracking");
  const Matrix& lv = value(loss);
  Require(lv.rows() == 1 && lv.cols() == 1, ErrorCode::kDimension,
          "backward target must be a scalar, got " + lv.ShapeString());
  for (auto& n : nodes_) n.grad = Matrix();
  if (!nodes_[loss.id].requires_grad) return;
  nodes_[loss.id].grad = Matrix(1, 1, 1.0);
  for (int id = loss.id; id >= 0; --id) {
    const Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.empty() || node.op == Op::kLeaf) continue;
    BackwardNode(node);
  }
}

void Tape::BackwardNode(const Node& node) {
  const Matrix& g = node.grad;
  auto in = [&](std::size_t i) -> const Node& { return nodes_[node.inputs[i]]; };
  auto wants = [&](std::size_t i) { return in(i).requires_grad; };

  switch (node.op) {
    case Op::kLeaf:
      break;
    case Op::kMatMul:
      if (wants(0)) Accumulate(node.inputs[0], nn::MatMulTransB(g, in(1).value));
      if (wants(1)) Accumulate(node.inputs[1], nn::MatMulTransA(in(0).value, g));
      break;
    case Op::kMatMulTransB:
      if (wants(0)) Accumulate(node.inputs[0], nn::MatMul(g, in(1).value));
      if (wants(1)) Accumulate(node.inputs[1], nn::MatMulTransA(g, in(0).value));
      break;
    case Op::kAdd:
      Accumulate(node.inputs[0], g);
      Accumulate(node.inputs[1], g);
      break;
    case Op::kSub: {
      Accumulate(node.inputs[0], g);
      if (wants(1)) {
        Matrix neg = g;
        for (double& v : neg.values()) v = -v;
        Accumulate(node.inputs[1], neg);
      }
      break;
    }
    case Op::kAddRowBias: {
      Accumulate(node.inputs[0], g);
      if (wants(1)) {
        Matrix db(1, g.cols());
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) db(0, c) += g(r, c);
        Accumulate(node.inputs[1], db);
      }
      break;
    }
    case Op::kMul:
      for (std::size_t k = 0; k < 2; ++k) {
        if (!wants(k)) continue;
        Matrix d = g;
        const auto other = in(1 - k).value.values();
        auto dv = d.values();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= other[i];
        Accumulate(node.inputs[k], d);
      }
      break;
    case Op::kScale: {
      Matrix d = g;
      for (double& v : d.values()) v *= node.scalar_a;
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kTanh: {
      Matrix d = g;
      const auto y = node.value.values();
      auto dv = d.values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= 1.0 - y[i] * y[i];
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kSoftmaxRows: {
      Matrix d(g.rows(), g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * node.value(r, c);
        for (std::size_t c = 0; c < g.cols(); ++c)
          d(r, c) = node.value(r, c) * (g(r, c) - dot);
      }
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kConcatRows: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        const std::size_t rows = in(k).value.rows();
        if (wants(k)) Accumulate(node.inputs[k], nn::SliceRows(g, offset, offset + rows));
        offset += rows;
      }
      break;
    }
    case Op::kConcatCols: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        const std::size_t cols = in(k).value.cols();
        if (wants(k)) {
          Matrix d(g.rows(), cols);
          for (std::size_t r = 0; r < g.rows(); ++r)
            std::copy(g.row(r).begin() + offset, g.row(r).begin() + offset + cols,
                      d.row(r).begin());
          Accumulate(node.inputs[k], d);
        }
        offset += cols;
      }
      break;
    }
    case Op::kSliceRows: {
      const Matrix& src = in(0).value;
      Matrix d(src.rows(), src.cols());
      std::copy(g.values().begin(), g.values().end(),
                d.values().begin() + node.offset * src.cols());
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kSliceCols: {
      const Matrix& src = in(0).value;
      Matrix d(src.rows(), src.cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        std::copy(g.row(r).begin(), g.row(r).end(), d.row(r).begin() + node.offset);
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kMeanRows: {
      const Matrix& src = in(0).value;
      Matrix d(src.rows(), src.cols());
      const double inv = 1.0 / static_cast<double>(src.rows());
      for (std::size_t r = 0; r < src.rows(); ++r)
        for (std::size_t c = 0; c < src.cols(); ++c) d(r, c) = g(0, c) * inv;
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kGatherRows: {
      const Matrix& table = in(0).value;
      Matrix d(table.rows(), table.cols());
      for (std::size_t i = 0; i < node.indices.size(); ++i)
        for (std::size_t c = 0; c < table.cols(); ++c) d(node.indices[i], c) += g(i, c);
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kScaleRows: {
      const Matrix& a = in(0).value;
      const Matrix& w = in(1).value;
      if (wants(0)) {
        Matrix d = g;
        for (std::size_t r = 0; r < d.rows(); ++r)
          for (double& v : d.row(r)) v *= w(r, 0);
        Accumulate(node.inputs[0], d);
      }
      if (wants(1)) {
        Matrix dw(w.rows(), 1);
        for (std::size_t r = 0; r < a.rows(); ++r)
          for (std::size_t c = 0; c < a.cols(); ++c) dw(r, 0) += g(r, c) * a(r, c);
        Accumulate(node.inputs[1], dw);
      }
      break;
    }
    case Op::kClamp: {
      Matrix d = g;
      const auto x = in(0).value.values();
      auto dv = d.values();
      for (std::size_t i = 0; i < dv.size(); ++i)
        if (x[i] < node.scalar_a || x[i] > node.scalar_b) dv[i] = 0.0;
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kSumSquares: {
      Matrix d = in(0).value;
      for (double& v : d.values()) v *= 2.0 * g(0, 0);
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kMeanAll: {
      const Matrix& src = in(0).value;
      Matrix d(src.rows(), src.cols(), g(0, 0) / static_cast<double>(src.size()));
      Accumulate(node.inputs[0], d);
      break;
    }
    case Op::kOneHotArgmax:
      Fail(ErrorCode::kCapability,
           "argmax one-hot routing is not differentiable; detach it before backward");
  }
}

}  // namespace cf::nn
