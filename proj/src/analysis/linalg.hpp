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

#ifndef CONTACTFLOW_ANALYSIS_LINALG_HPP_
#define CONTACTFLOW_ANALYSIS_LINALG_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "nn/matrix.hpp"

namespace cf::analysis {

// Singular values in descending order via one-sided Jacobi rotations.
std::vector<double> SingularValues(const nn::Matrix& m);

// max(rows, cols) * eps * sigma_max.
double DefaultRankTolerance(const nn::Matrix& m, const std::vector<double>& singular);

// Count of singular values above `tol` (default tolerance when absent).
std::size_t NumericalRank(const nn::Matrix& m, std::optional<double> tol = std::nullopt);

}  // namespace cf::analysis

#endif  // CONTACTFLOW_ANALYSIS_LINALG_HPP_
