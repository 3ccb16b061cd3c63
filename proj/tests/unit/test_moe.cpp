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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "moe/cross_scale_moe.hpp"
#include "nn/rng.hpp"
#include "nn/tape.hpp"
#include "state/state_encoder.hpp"

using cf::nn::Matrix;
namespace moe = cf::moe;

namespace {

Matrix RandomMatrix(std::size_t r, std::size_t c, cf::nn::Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.Normal();
  return m;
}

}  // namespace

TEST_CASE("gate weights") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(1);
  const auto bank = moe::CrossScaleMoe::Create(params, 6, rng, 2);
  const Matrix tokens = RandomMatrix(20, 6, rng);
  {
    cf::nn::Tape t(&params, false);
    const Matrix w = t.value(bank.Gate(t, t.Constant(tokens)));
    for (std::size_t r = 0; r < w.rows(); ++r)
      CHECK(w(r, 0) + w(r, 1) + w(r, 2) == doctest::Approx(1.0).epsilon(1e-14));
  }
  cf::nn::ParamSet zero = params;
  zero.mutable_value(bank.gate_layer().weight).Fill(0.0);
  zero.mutable_value(bank.gate_layer().bias).Fill(0.0);
  cf::nn::Tape t(&zero, false);
  const Matrix w = t.value(bank.Gate(t, t.Constant(tokens)));
  for (double v : w.values()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const std::vector<double> logits{std::log(2.0), 0.0, 0.0};
  const auto g = moe::GateFromLogits(logits);
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("top1 routing") {
  CHECK(moe::Top1Route({0.5, 0.3, 0.2}, moe::RoutingMode::kTop1) == moe::GateWeights{1, 0, 0});
  CHECK(moe::Top1Route({0.5, 0.5, 0.0}, moe::RoutingMode::kTop1) == moe::GateWeights{1, 0, 0});
  CHECK(moe::Top1Route({0.2, 0.3, 0.5}, moe::RoutingMode::kTop1) == moe::GateWeights{0, 0, 1});
  CHECK(moe::Top1Route({0.2, 0.3, 0.5}, moe::RoutingMode::kSoft) ==
        moe::GateWeights{0.2, 0.3, 0.5});
  CHECK(moe::ParseRoutingMode("top1") == moe::RoutingMode::kTop1);
  CHECK_THROWS_AS(moe::ParseRoutingMode("hard"), cf::Error);
}

TEST_CASE("mixture forward") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(2);
  const auto bank = moe::CrossScaleMoe::Create(params, 5, rng, 2);
  const Matrix tokens = RandomMatrix(7, 5, rng);

  SUBCASE("one-hot gate selects the expert") {
    Matrix onehot(7, 3);
    for (std::size_t r = 0; r < 7; ++r) onehot(r, moe::kVisual) = 1.0;
    cf::nn::Tape t(&params, false);
    auto x = t.Constant(tokens);
    const Matrix out = t.value(bank.Forward(t, x, moe::RoutingMode::kSoft, t.Constant(onehot)));
    CHECK(out == t.value(bank.ExpertOutput(t, moe::kVisual, x)));
  }

  SUBCASE("identical experts ignore the gate") {
    cf::nn::ParamSet same = params;
    for (std::size_t m = 1; m < 3; ++m)
      for (std::size_t l = 0; l < 2; ++l) {
        same.Set(bank.expert(m).layers[l].weight, params.value(bank.expert(0).layers[l].weight));
        same.Set(bank.expert(m).layers[l].bias, params.value(bank.expert(0).layers[l].bias));
      }
    cf::nn::Tape t(&same, false);
    auto x = t.Constant(tokens);
    const Matrix out = t.value(bank.Forward(t, x, moe::RoutingMode::kSoft));
    CHECK(cf::nn::MaxAbsDiff(out, t.value(bank.ExpertOutput(t, 0, x))) < 1e-14);
  }

  SUBCASE("per-token reference") {
    cf::nn::Tape t(&params, false);
    const Matrix out = t.value(bank.Forward(t, t.Constant(tokens), moe::RoutingMode::kSoft));
    for (std::size_t r = 0; r < 7; ++r) {
      const Matrix row = cf::nn::SliceRows(tokens, r, r + 1);
      const Matrix logits = bank.gate_layer().Eval(params, row);
      const auto g = moe::GateFromLogits(logits.values());
      for (std::size_t c = 0; c < 5; ++c) {
        double expect = 0.0;
        for (std::size_t m = 0; m < 3; ++m) expect += g[m] * bank.expert(m).Eval(params, row)(0, c);
        CHECK(out(r, c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }

  SUBCASE("top1 mode") {
    cf::nn::Tape t(&params, false);
    auto x = t.Constant(tokens);
    const Matrix out = t.value(bank.Forward(t, x, moe::RoutingMode::kTop1));
    const Matrix w = t.value(bank.Gate(t, x));
    for (std::size_t r = 0; r < 7; ++r) {
      const auto pick = moe::Top1Route({w(r, 0), w(r, 1), w(r, 2)}, moe::RoutingMode::kTop1);
      std::size_t m = 0;
      while (pick[m] != 1.0) ++m;
      const Matrix e = t.value(bank.ExpertOutput(t, m, x));
      for (std::size_t c = 0; c < 5; ++c) CHECK(out(r, c) == e(r, c));
    }
  }

  cf::nn::Tape t(&params, false);
  CHECK_THROWS_AS(bank.Forward(t, t.Constant(Matrix(2, 4)), moe::RoutingMode::kSoft), cf::Error);
}

TEST_CASE("modality masks") {
  cf::nn::Rng rng(3);
  cf::nn::Tape t;
  auto tokens = t.Constant(RandomMatrix(8, 4, rng));
  cf::state::ConditionedSequence seq{tokens, {0, 5}, {5, 7}, {7, 8}};
  CHECK(t.value(moe::ApplyMask(t, seq, {true, true})).rows() == 8);
  CHECK(t.value(moe::ApplyMask(t, seq, {false, true})).rows() == 3);
  CHECK(t.value(moe::ApplyMask(t, seq, {true, false})).rows() == 7);
  const Matrix state_only = t.value(moe::ApplyMask(t, seq, {false, false}));
  CHECK(state_only == cf::nn::SliceRows(t.value(tokens), 5, 7));
  cf::state::ConditionedSequence empty_state{tokens, {0, 5}, {5, 5}, {5, 5}};
  CHECK_THROWS_AS(moe::ApplyMask(t, empty_state, {false, false}), cf::Error);
}
