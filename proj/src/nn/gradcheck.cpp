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

#include "nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cf::nn {

std::vector<double> CentralDifferences(const ScalarFunction& f,
                                       std::span<const double> point, double step) {
  Require(step > 0.0, ErrorCode::kDomain, "finite-difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = f(x);
    x[i] = saved - step;
    const double minus = f(x);
    x[i] = saved;
    out[i] = (plus - minus) / (2.0 * step);
  }
  return out;
}

std::vector<double> FivePointDifferences(const ScalarFunction& f,
                                         std::span<const double> point, double step) {
  Require(step > 0.0, ErrorCode::kDomain, "finite-difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> out(x.size());
  auto at = [&](std::size_t i, double offset) {
    x[i] = point[i] + offset;
    return f(x);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double near = at(i, step) - at(i, -step);
    const double far = at(i, 2.0 * step) - at(i, -2.0 * step);
    x[i] = point[i];
    out[i] = (8.0 * near - far) / (12.0 * step);
  }
  return out;
}

double FiniteDiffCheck(const ScalarFunction& f, std::span<const double> analytic,
                       std::span<const double> point, double step) {
  Require(analytic.size() == point.size(), ErrorCode::kDimension,
          "gradient and point lengths differ");
  const auto numeric = CentralDifferences(f, point, step);
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double err = std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace cf::nn
