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

#ifndef CONTACTFLOW_NN_PARAMS_HPP_
#define CONTACTFLOW_NN_PARAMS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nn/matrix.hpp"
#include "nn/rng.hpp"

namespace cf::nn {

using ParamId = std::size_t;

// Named parameter tensors in insertion order. Shapes are fixed once added;
// values may be overwritten with same-shaped matrices.
class ParamSet {
 public:
  ParamId Add(std::string name, Matrix value);
  ParamId Id(std::string_view name) const;
  bool Contains(std::string_view name) const;

  std::size_t size() const noexcept { return values_.size(); }
  const std::string& name(ParamId id) const { return names_.at(id); }
  const Matrix& value(ParamId id) const { return values_.at(id); }
  Matrix& mutable_value(ParamId id) { return values_.at(id); }
  void Set(ParamId id, Matrix value);

  std::size_t ScalarCount() const;
  // Flattened view of all parameters in ParamSet order.
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);

  // Zero-valued matrices with the same shapes (gradient/moment buffers).
  std::vector<Matrix> ZerosLike() const;
  bool SameLayout(const ParamSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::unordered_map<std::string, ParamId> index_;
};

using Gradients = std::vector<Matrix>;

// Uniform in +-1/sqrt(fan_in).
Matrix UniformInit(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_PARAMS_HPP_
