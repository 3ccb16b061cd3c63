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


#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "analysis/control_analysis.hpp"
#include "analysis/linalg.hpp"
#include "doctest.h"
#include "error.hpp"
#include "nn/rng.hpp"

using cf::nn::Matrix;
namespace an = cf::analysis;

namespace {

Eigen::MatrixXd ToEigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

cf::sim::EnvParams Linear() {
  cf::sim::EnvParams env;
  env.damping = 0.0;
  env.friction = 0.0;
  return env;
}

const cf::geom::Pose6 kContact{0.0, 0.0, -0.01, 0.0, 0.0, 0.0};

// Dimension of the smallest A-invariant subspace containing span(B).
std::size_t ReachableByIteration(const Matrix& a, const Matrix& b) {
  Eigen::MatrixXd basis = ToEigen(b);
  const Eigen::MatrixXd ea = ToEigen(a);
  Eigen::Index dim = Eigen::FullPivLU<Eigen::MatrixXd>(basis).rank();
  for (;;) {
    Eigen::MatrixXd grown(basis.rows(), basis.cols() * 2);
    grown << basis, ea * basis;
    const Eigen::Index next = Eigen::FullPivLU<Eigen::MatrixXd>(grown).rank();
    if (next == dim) return static_cast<std::size_t>(dim);
    basis = grown;
    dim = next;
  }
}

}  // namespace

TEST_CASE("singular values match a reference decomposition") {
  cf::nn::Rng rng(1);
  for (auto [r, c] : {std::pair{12, 72}, std::pair{40, 12}, std::pair{5, 5}}) {
    Matrix m(r, c);
    for (auto& v : m.values()) v = rng.Normal();
    const auto ours = an::SingularValues(m);
    const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(ToEigen(m)).singularValues();
    REQUIRE(ours.size() == static_cast<std::size_t>(ref.size()));
    for (std::size_t i = 0; i < ours.size(); ++i)
      CHECK(ours[i] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-10));
  }
  CHECK(an::NumericalRank(Matrix::Identity(12)) == 12);
  Matrix outer(6, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) outer(i, j) = (i + 1.0) * (j - 1.5);
  CHECK(an::NumericalRank(outer) == 1);
}

TEST_CASE("contact jacobian") {
  const auto env = Linear();
  const Matrix free = an::LinearizeEnv(env, {0, 0, 0.1, 0, 0, 0});
  CHECK(free == Matrix(6, 6));
  const Matrix j = an::LinearizeEnv(env, kContact);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) {
      if (r == 2 && c == 2)
        CHECK(j(r, c) == doctest::Approx(-env.stiffness).epsilon(1e-8));
      else
        CHECK(std::abs(j(r, c)) < 1e-6);
    }
  CHECK(cf::nn::MaxAbsDiff(j, cf::nn::Transpose(j)) < 1e-6);
}

TEST_CASE("system construction") {
  const Matrix literal = an::BuildSystem(Matrix(6, 6), an::ControlMode::kPositionOnly).b;
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 6; ++c) CHECK(literal(r, c) == (r == c ? 1.0 : 0.0));

  const Matrix j = an::LinearizeEnv(Linear(), kContact);
  const auto pos = an::BuildSystem(j, an::ControlMode::kPositionOnly);
  std::size_t nonzero_rows = 0;
  for (std::size_t r = 0; r < 12; ++r) {
    bool any = false;
    for (std::size_t c = 0; c < 6; ++c) any = any || std::abs(pos.b(r, c)) > 1e-9;
    nonzero_rows += any ? 1 : 0;
  }
  CHECK(nonzero_rows == 7);
  CHECK(an::NumericalRank(pos.b) == 6);
  const auto hyb = an::BuildSystem(j, an::ControlMode::kHybrid);
  CHECK(hyb.b.cols() == 12);
  CHECK(an::NumericalRank(hyb.b) == 12);
  CHECK_THROWS_AS(an::BuildSystem(Matrix(5, 6), an::ControlMode::kHybrid), cf::Error);
}

TEST_CASE("controllability matrix") {
  const Matrix j = an::LinearizeEnv(Linear(), kContact);
  const auto pos = an::BuildSystem(j, an::ControlMode::kPositionOnly);
  const Matrix c = an::ControllabilityMatrix(pos);
  CHECK(c.cols() == 6 * an::kHorizonPowers);
  CHECK(an::NumericalRank(c) == an::NumericalRank(pos.b));
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t col = 6; col < c.cols(); ++col) CHECK(c(r, col) == 0.0);

  auto ident = pos;
  ident.a = Matrix::Identity(12);
  CHECK(an::NumericalRank(an::ControllabilityMatrix(ident)) == 6);

  cf::nn::Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    an::LinearSystem sys;
    sys.a = Matrix(12, 12);
    sys.b = Matrix(12, 2);
    // Block-structured A so some instances are not fully controllable.
    const std::size_t live = 4 + static_cast<std::size_t>(trial);
    for (std::size_t r = 0; r < live && r < 12; ++r)
      for (std::size_t k = 0; k < live && k < 12; ++k) sys.a(r, k) = rng.Normal() * 0.5;
    for (std::size_t r = 0; r < std::min<std::size_t>(live, 12); ++r)
      for (std::size_t k = 0; k < 2; ++k) sys.b(r, k) = rng.Normal();
    CHECK(an::Analyze(sys).rank == ReachableByIteration(sys.a, sys.b));
  }
}

TEST_CASE("controllability index") {
  CHECK(an::ControllabilityIndex(6, 12) == 0.5);
  CHECK(an::ControllabilityIndex(12, 12) == 1.0);
  CHECK(an::ControllabilityIndex(3, 12) == 0.25);
  CHECK_THROWS_AS(an::ControllabilityIndex(13, 12), cf::Error);

  const Matrix j = an::LinearizeEnv(Linear(), kContact);
  const auto pos = an::Analyze(an::BuildSystem(j, an::ControlMode::kPositionOnly));
  CHECK(pos.rank == 6);
  CHECK(pos.kappa == 0.5);
  const auto hyb = an::Analyze(an::BuildSystem(j, an::ControlMode::kHybrid));
  CHECK(hyb.rank == 12);
  CHECK(hyb.kappa == 1.0);
  const auto weak = an::Analyze(an::BuildSystem(j, an::ControlMode::kHybrid, 0.0));
  CHECK(weak.rank == 6);
}

TEST_CASE("sampled reachable dimension") {
  const auto env = Linear();
  const auto pos = an::ReachableDimEstimate(env, an::ControlMode::kPositionOnly, kContact, 2000, 1);
  CHECK(pos.dimension == 6);
  CHECK(pos.tail_ratio < 1e-6);
  const auto hyb = an::ReachableDimEstimate(env, an::ControlMode::kHybrid, kContact, 2000, 1);
  CHECK(hyb.dimension == 12);
  const auto air =
      an::ReachableDimEstimate(env, an::ControlMode::kPositionOnly, {0, 0, 0.2, 0, 0, 0}, 2000, 1);
  CHECK(air.dimension == 6);
  CHECK_THROWS_AS(
      an::ReachableDimEstimate(env, an::ControlMode::kHybrid, kContact, 10, 1), cf::Error);
}
