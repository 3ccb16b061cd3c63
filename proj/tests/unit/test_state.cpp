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
#include <numbers>
#include <vector>

#include "context/context_encoder.hpp"
#include "doctest.h"
#include "error.hpp"
#include "nn/layers.hpp"
#include "nn/rng.hpp"
#include "nn/tape.hpp"
#include "state/geometry.hpp"
#include "state/state_encoder.hpp"

using cf::nn::Matrix;
namespace st = cf::state;

namespace {

Matrix RandomMatrix(std::size_t r, std::size_t c, cf::nn::Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.Normal();
  return m;
}

Matrix Affine(const cf::nn::ParamSet& p, const cf::nn::Linear& l, const Matrix& x) {
  Matrix y(x.rows(), l.out);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < l.out; ++j) {
      double acc = p.value(l.bias)(0, j);
      for (std::size_t i = 0; i < l.in; ++i) acc += x(r, i) * p.value(l.weight)(i, j);
      y(r, j) = acc;
    }
  return y;
}

}  // namespace

TEST_CASE("geometry") {
  const cf::geom::Vec3 r{0.1, -0.4, 0.25};
  const auto back = cf::geom::RotationVectorFromQuat(cf::geom::QuatFromRotationVector(r));
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(r[i]).epsilon(1e-12));
  CHECK(cf::geom::QuatNormalize({0, 0, 0, 0}) == cf::geom::kIdentityQuat);
  const auto q = cf::geom::QuatFromRotationVector({0, 0, std::numbers::pi / 2});
  const auto x = cf::geom::QuatRotate(q, {1, 0, 0});
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("wrench normalization") {
  auto n = st::NormalizeWrench({0, 0, -50, 0, 0, 0});
  CHECK(n[2] == -0.5);
  n = st::NormalizeWrench({0, 0, 0, 15, 0, 0});
  CHECK(n[3] == 1.0);
  n = st::NormalizeWrench({0, 0, 120, 0, 0, 0});
  CHECK(n[2] == 1.0);
}

TEST_CASE("pose encoding") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(4);
  const auto enc = st::StateEncoder::Create(params, 10, 1, rng);
  // Identity-like map padded with zeros echoes the pose.
  cf::nn::ParamSet id = params;
  Matrix w(7, 10);
  for (std::size_t i = 0; i < 7; ++i) w(i, i) = 1.0;
  id.Set(enc.pose_proj().weight, w);
  id.mutable_value(enc.pose_proj().bias).Fill(0.0);
  st::ProprioState zero;
  cf::nn::Tape t0(&id, false);
  const Matrix e0 = t0.value(enc.EncodePose(t0, zero));
  for (std::size_t i = 0; i < 7; ++i) CHECK(e0(0, i) == zero.pose[i]);

  // Affine in the position coordinates.
  st::ProprioState p, p2, origin;
  p.pose = {0.1, -0.2, 0.3, 1, 0, 0, 0};
  p2.pose = {0.2, -0.4, 0.6, 1, 0, 0, 0};
  auto encode = [&](const st::ProprioState& s) {
    cf::nn::Tape t(&params, false);
    return t.value(enc.EncodePose(t, s));
  };
  const Matrix a = encode(p), b = encode(p2), c = encode(origin);
  for (std::size_t j = 0; j < 10; ++j)
    CHECK(b(0, j) - c(0, j) == doctest::Approx(2.0 * (a(0, j) - c(0, j))).epsilon(1e-12));
  CHECK(cf::nn::MaxAbsDiff(a, Affine(params, enc.pose_proj(), Matrix::RowVector(p.pose))) < 1e-14);

  st::ProprioState bad;
  bad.pose = {0, 0, 0, 2, 0, 0, 0};
  cf::nn::Tape t(&params, false);
  CHECK_THROWS_AS(enc.EncodePose(t, bad), cf::Error);
}

TEST_CASE("force encoding") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(5);
  const auto enc = st::StateEncoder::Create(params, 8, 1, rng);
  cf::nn::ParamSet nb = params;
  nb.mutable_value(enc.force_proj().bias).Fill(0.0);
  cf::nn::Tape t0(&nb, false);
  CHECK(t0.value(enc.EncodeForce(t0, cf::geom::Wrench{})) == Matrix(1, 8));

  const cf::geom::Wrench w{10, -20, 30, 1.5, 0, -3};
  cf::geom::Wrench w2 = w;
  for (auto& v : w2) v *= 2.0;
  auto encode = [&](const cf::geom::Wrench& x) {
    cf::nn::Tape t(&params, false);
    return t.value(enc.EncodeForce(t, x));
  };
  const Matrix a = encode(w), b = encode(w2), c = encode({});
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(b(0, j) - c(0, j) == doctest::Approx(2.0 * (a(0, j) - c(0, j))).epsilon(1e-12));
  const auto n = st::NormalizeWrench(w);
  CHECK(cf::nn::MaxAbsDiff(a, Affine(params, enc.force_proj(), Matrix::RowVector(n))) < 1e-14);
}

TEST_CASE("cross-modal conditioning") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(6);
  const auto enc = st::StateEncoder::Create(params, 6, 1, rng);
  const Matrix state = RandomMatrix(2, 6, rng);
  const Matrix single = RandomMatrix(1, 6, rng);

  {
    // One context token: every query sees that token's value projection.
    cf::nn::Tape t(&params, false);
    const Matrix out = t.value(enc.CrossModalCondition(t, t.Constant(state), t.Constant(single)));
    const Matrix value = Affine(params, enc.cross().value, single);
    const Matrix mixed = Affine(params, enc.cross().output, value);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 6; ++c)
        CHECK(out(r, c) == doctest::Approx(state(r, c) + mixed(0, c)).epsilon(1e-12));
  }
  {
    cf::nn::ParamSet z = params;
    z.mutable_value(enc.cross().value.weight).Fill(0.0);
    z.mutable_value(enc.cross().value.bias).Fill(0.0);
    z.mutable_value(enc.cross().output.bias).Fill(0.0);
    cf::nn::Tape t(&z, false);
    const Matrix context = RandomMatrix(5, 6, rng);
    CHECK(cf::nn::MaxAbsDiff(
              t.value(enc.CrossModalCondition(t, t.Constant(state), t.Constant(context))),
              state) == 0.0);
  }
  const Matrix context = RandomMatrix(5, 6, rng);
  cf::nn::Tape t(&params, false);
  const Matrix out = t.value(enc.CrossModalCondition(t, t.Constant(state), t.Constant(context)));
  const Matrix attended = cf::nn::ScaledDotAttention(Affine(params, enc.cross().query, state),
                                                     Affine(params, enc.cross().key, context),
                                                     Affine(params, enc.cross().value, context));
  const Matrix mixed = Affine(params, enc.cross().output, attended);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      CHECK(out(r, c) == doctest::Approx(state(r, c) + mixed(r, c)).epsilon(1e-12));
}

TEST_CASE("condition assembly") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(7);
  const auto enc = st::StateEncoder::Create(params, 4, 1, rng);
  cf::nn::Tape t(&params, false);
  auto context = t.Constant(RandomMatrix(5, 4, rng));
  auto state = t.Constant(RandomMatrix(2, 4, rng));
  auto force = enc.EncodeForce(t, cf::geom::Wrench{3, 0, 12, 0, 0, 0});
  const auto seq = st::AssembleCondition(t, context, state, force);
  CHECK(t.value(seq.tokens).rows() == 8);
  CHECK(seq.context.begin == 0);
  CHECK(seq.context.end == 5);
  CHECK(seq.state.begin == 5);
  CHECK(seq.state.end == 7);
  CHECK(seq.bypass.begin == 7);
  CHECK(seq.bypass.end == 8);
  const Matrix last = cf::nn::SliceRows(t.value(seq.tokens), 7, 8);
  CHECK(last == t.value(force));

  const auto without = st::AssembleCondition(t, context, state, std::nullopt);
  CHECK(t.value(without.tokens).rows() == 7);
  CHECK(without.bypass.empty());
}

TEST_CASE("injection variants") {
  const auto fusion = st::ApplyInjectionVariant(st::InjectionVariant::kStateFusion);
  CHECK(fusion.force_state_token);
  CHECK(fusion.bypass);
  const auto me = st::ApplyInjectionVariant(st::InjectionVariant::kMultimodalEncoder);
  CHECK_FALSE(me.bypass);
  const auto vlm = st::ApplyInjectionVariant(st::InjectionVariant::kVlmPathway);
  CHECK(vlm.force_in_context);
  CHECK(st::ParseInjectionVariant("state_fusion") == st::InjectionVariant::kStateFusion);
  CHECK_THROWS_AS(st::ParseInjectionVariant("late"), cf::Error);

  // The VLM pathway appends one force token to the fused context.
  cf::context::ContextConfig config;
  config.visual_feature_dim = 3;
  config.visual_tokens = 4;
  config.task_tokens = 2;
  config.force_tokens = 2;
  config.vocab_size = 5;
  config.width = 4;
  config.blocks = 1;
  config.extra_tokens = 1;
  cf::nn::ParamSet params;
  cf::nn::Rng rng(8);
  const auto ce = cf::context::ContextEncoder::Create(params, config, rng);
  const auto se = st::StateEncoder::Create(params, 4, 1, rng);
  cf::nn::Tape t(&params, false);
  cf::context::VisualObservation obs{{RandomMatrix(2, 3, rng), RandomMatrix(2, 3, rng)}};
  cf::context::PromptTokens prompts{{1, 2}, {3, 0}, 5};
  auto e = ce.Encode(t, obs, prompts, se.EncodeForce(t, cf::geom::Wrench{1, 2, 3, 0, 0, 0}));
  CHECK(t.value(e).rows() == 4 + 2 + 2 + 1);
}
