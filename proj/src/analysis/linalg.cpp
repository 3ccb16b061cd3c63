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

#include "analysis/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "error.hpp"

namespace cf::analysis {

std::vector<double> SingularValues(const nn::Matrix& m) {
  Require(m.AllFinite(), ErrorCode::kNumeric, "matrix has non-finite entries");
  if (m.empty()) return {};
  // Work on columns of the taller orientation.
  const nn::Matrix a0 = m.rows() >= m.cols() ? m : nn::Transpose(m);
  const std::size_t rows = a0.rows();
  const std::size_t cols = a0.cols();
  std::vector<std::vector<double>> col(cols, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) col[c][r] = a0(r, c);

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += col[p][r] * col[p][r];
          beta += col[q][r] * col[q][r];
          gamma += col[p][r] * col[q][r];
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double x = col[p][r];
          const double y = col[q][r];
          col[p][r] = c * x - s * y;
          col[q][r] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double ss = 0.0;
    for (double v : col[c]) ss += v * v;
    out[c] = std::sqrt(ss);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double DefaultRankTolerance(const nn::Matrix& m, const std::vector<double>& singular) {
  const double top = singular.empty() ? 0.0 : singular.front();
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * top;
}

std::size_t NumericalRank(const nn::Matrix& m, std::optional<double> tol) {
  const std::vector<double> sv = SingularValues(m);
  const double threshold = tol ? *tol : DefaultRankTolerance(m, sv);
  Require(!tol || *tol > 0.0, ErrorCode::kDomain, "rank tolerance must be positive");
  return static_cast<std::size_t>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > threshold; }));
}

}  // namespace cf::analysis
