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

#ifndef CONTACTFLOW_NN_GRADCHECK_HPP_
#define CONTACTFLOW_NN_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <vector>

namespace cf::nn {

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

// max_i |analytic_i - central_i| / max(1, |analytic_i|), with central
// differences of `f` at `point` using `step`.
double FiniteDiffCheck(const ScalarFunction& f, std::span<const double> analytic,
                       std::span<const double> point, double step = 1e-5);

std::vector<double> CentralDifferences(const ScalarFunction& f,
                                       std::span<const double> point, double step);
// Fourth-order stencil: (8 [f(x+h) - f(x-h)] - [f(x+2h) - f(x-2h)]) / 12h.
std::vector<double> FivePointDifferences(const ScalarFunction& f,
                                         std::span<const double> point, double step);

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_GRADCHECK_HPP_
