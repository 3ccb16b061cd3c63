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

#ifndef CONTACTFLOW_NN_RNG_HPP_
#define CONTACTFLOW_NN_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cf::nn {

inline constexpr std::uint64_t kDefaultSeed = 42;

// Seeded generator with portable transforms. std::mt19937_64 output is fixed
// by the standard; the distribution objects are not, so the uniform and
// normal transforms are spelled out here to keep artifacts bit-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  // Uniform on [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform on (0, 1].
  double UniformOpenZero() { return 1.0 - Uniform(); }

  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = UniformOpenZero();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t Next() { return engine_(); }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(Uniform() * n); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cf::nn

#endif  // CONTACTFLOW_NN_RNG_HPP_
