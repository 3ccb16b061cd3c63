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

#include "nn/params.hpp"

#include <cmath>

#include "error.hpp"

namespace cf::nn {

ParamId ParamSet::Add(std::string name, Matrix value) {
  Require(!index_.contains(name), ErrorCode::kDomain,
          "duplicate parameter name '" + name + "'");
  const ParamId id = values_.size();
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return id;
}

ParamId ParamSet::Id(std::string_view name) const {
  auto it = index_.find(std::string(name));
  Require(it != index_.end(), ErrorCode::kDomain,
          "unknown parameter '" + std::string(name) + "'");
  return it->second;
}

bool ParamSet::Contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

void ParamSet::Set(ParamId id, Matrix value) {
  Require(values_.at(id).SameShape(value), ErrorCode::kDimension,
          "parameter '" + names_[id] + "' expects shape " +
              values_[id].ShapeString() + ", got " + value.ShapeString());
  values_[id] = std::move(value);
}

std::size_t ParamSet::ScalarCount() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

std::vector<double> ParamSet::Flatten() const {
  std::vector<double> flat;
  flat.reserve(ScalarCount());
  for (const auto& v : values_)
    flat.insert(flat.end(), v.values().begin(), v.values().end());
  return flat;
}

void ParamSet::Unflatten(std::span<const double> flat) {
  Require(flat.size() == ScalarCount(), ErrorCode::kDimension,
          "flat parameter vector has wrong length");
  std::size_t offset = 0;
  for (auto& v : values_) {
    std::copy(flat.begin() + offset, flat.begin() + offset + v.size(),
              v.values().begin());
    offset += v.size();
  }
}

std::vector<Matrix> ParamSet::ZerosLike() const {
  std::vector<Matrix> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.emplace_back(v.rows(), v.cols());
  return out;
}

bool ParamSet::SameLayout(const ParamSet& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (names_[i] != other.names_[i] || !values_[i].SameShape(other.values_[i]))
      return false;
  return true;
}

Matrix UniformInit(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.Uniform(-bound, bound);
  return m;
}

}  // namespace cf::nn
