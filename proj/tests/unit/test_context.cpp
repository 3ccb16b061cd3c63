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
#include <string>
#include <vector>

#include "context/context_encoder.hpp"
#include "context/subtask_plan.hpp"
#include "context/tokenizer.hpp"
#include "doctest.h"
#include "error.hpp"
#include "nn/layers.hpp"
#include "nn/rng.hpp"
#include "nn/tape.hpp"

using cf::nn::Matrix;
namespace ctx = cf::context;

namespace {

Matrix RandomMatrix(std::size_t r, std::size_t c, cf::nn::Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.Normal();
  return m;
}

Matrix Affine(const cf::nn::ParamSet& p, const cf::nn::Linear& l, const Matrix& x) {
  Matrix y(x.rows(), l.out);
  const Matrix& w = p.value(l.weight);
  const Matrix& b = p.value(l.bias);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < l.out; ++j) {
      double acc = b(0, j);
      for (std::size_t i = 0; i < l.in; ++i) acc += x(r, i) * w(i, j);
      y(r, j) = acc;
    }
  return y;
}

Matrix Plus(Matrix a, const Matrix& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a.values()[i] += b.values()[i];
  return a;
}

std::vector<ctx::PromptBlock> Corpus() {
  return {{"press the button", {"approach", "press", "release"}},
          {"wipe the board", {"approach", "wipe firmly", "lift"}}};
}

ctx::ContextConfig SmallConfig(std::size_t vocab) {
  ctx::ContextConfig c;
  c.visual_feature_dim = 3;
  c.visual_tokens = 4;
  c.task_tokens = 3;
  c.force_tokens = 2;
  c.vocab_size = vocab;
  c.width = 6;
  c.blocks = 1;
  c.heads = 1;
  c.mlp_ratio = 2;
  return c;
}

}  // namespace

TEST_CASE("prompt corpus and vocabulary") {
  const auto corpus = Corpus();
  const auto parsed = ctx::ParsePromptCorpus(ctx::FormatPromptCorpus(corpus));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[1].task_prompt == "wipe the board");
  CHECK(parsed[0].force_prompts == corpus[0].force_prompts);

  const auto vocab = ctx::Vocabulary::Build(corpus);
  CHECK(vocab.word(ctx::Vocabulary::kPad) != "press");
  CHECK(vocab.task_length() == 3);
  CHECK(vocab.force_length() == 2);
  const auto short_prompt = vocab.EncodeForce("press");
  const auto long_prompt = vocab.EncodeForce("wipe firmly");
  CHECK(short_prompt.size() == long_prompt.size());
  CHECK(short_prompt[1] == ctx::Vocabulary::kPad);
}

TEST_CASE("force prompt state machine") {
  const auto corpus = Corpus();
  const auto vocab = ctx::Vocabulary::Build(corpus);
  auto plan = ctx::SubtaskPlan::FromBlock(corpus[0]);
  CHECK(ctx::RenderForcePrompt(plan, vocab) == vocab.EncodeForce("approach"));
  CHECK(ctx::RenderForcePrompt(plan, vocab) == ctx::RenderForcePrompt(plan, vocab));
  const auto next = ctx::AdvanceSubtask(plan);
  CHECK(next.index == 1);
  CHECK(ctx::RenderForcePrompt(next, vocab) == vocab.EncodeForce("press"));
  for (std::size_t n = 0; n < 6; ++n) {
    auto p = plan;
    for (std::size_t i = 0; i < n; ++i) p = ctx::AdvanceSubtask(p);
    CHECK(p.index == std::min<std::size_t>(n, 2));
  }
  CHECK_THROWS_AS(ctx::SubtaskPlan::FromBlock({"empty", {}}), cf::Error);
}

TEST_CASE("visual encoding") {
  cf::nn::ParamSet params;
  cf::nn::Rng rng(1);
  const auto enc = ctx::ContextEncoder::Create(params, SmallConfig(10), rng);
  params.mutable_value(enc.visual_proj().bias).Fill(0.0);
  ctx::VisualObservation zero{{Matrix(2, 3), Matrix(2, 3)}};
  {
    cf::nn::Tape tape(&params, false);
    CHECK(tape.value(enc.EncodeVisual(tape, zero)) == Matrix(4, 6));
  }
  ctx::VisualObservation obs{{RandomMatrix(2, 3, rng), RandomMatrix(2, 3, rng)}};
  cf::nn::Tape a(&params, false), b(&params, false);
  const Matrix za = a.value(enc.EncodeVisual(a, obs));
  CHECK(za == b.value(enc.EncodeVisual(b, obs)));
  CHECK(cf::nn::MaxAbsDiff(za, Affine(params, enc.visual_proj(), obs.Stacked())) < 1e-13);

  ctx::VisualObservation wrong{{Matrix(2, 5)}};
  cf::nn::Tape t(&params, false);
  CHECK_THROWS_AS(enc.EncodeVisual(t, wrong), cf::Error);
}

TEST_CASE("text encoding") {
  const auto corpus = Corpus();
  const auto vocab = ctx::Vocabulary::Build(corpus);
  cf::nn::ParamSet params;
  cf::nn::Rng rng(2);
  const auto enc = ctx::ContextEncoder::Create(params, SmallConfig(vocab.size()), rng);
  const Matrix& table = params.value(enc.embedding());

  // Identity text projection turns the encoder into a lookup.
  cf::nn::ParamSet id = params;
  id.Set(enc.text_proj().weight, Matrix::Identity(6));
  id.mutable_value(enc.text_proj().bias).Fill(0.0);
  ctx::PromptTokens pad{{0}, {0}, vocab.size()};
  cf::nn::Tape t0(&id, false);
  const Matrix rows = t0.value(enc.EncodeText(t0, pad));
  for (std::size_t c = 0; c < 6; ++c) CHECK(rows(0, c) == table(0, c));

  const auto tokens = vocab.Encode("press the button", "press");
  cf::nn::Tape t1(&params, false);
  const Matrix z = t1.value(enc.EncodeText(t1, tokens));
  std::vector<std::size_t> ids = tokens.task;
  ids.insert(ids.end(), tokens.force.begin(), tokens.force.end());
  Matrix gathered(ids.size(), 6);
  for (std::size_t r = 0; r < ids.size(); ++r)
    for (std::size_t c = 0; c < 6; ++c) gathered(r, c) = table(ids[r], c);
  CHECK(cf::nn::MaxAbsDiff(z, Affine(params, enc.text_proj(), gathered)) < 1e-13);

  // Swapping roles moves the rows.
  ctx::PromptTokens swapped{tokens.force, tokens.task, tokens.vocab_size};
  cf::nn::Tape t2(&params, false);
  const Matrix zs = t2.value(enc.EncodeText(t2, swapped));
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(zs(0, c) == z(tokens.task.size(), c));
    CHECK(zs(tokens.force.size(), c) == z(0, c));
  }

  ctx::PromptTokens bad{{99}, {0}, vocab.size()};
  cf::nn::Tape t3(&params, false);
  CHECK_THROWS_AS(enc.EncodeText(t3, bad), cf::Error);
}

TEST_CASE("context fusion") {
  cf::nn::Rng rng(3);
  auto config = SmallConfig(8);
  {
    cf::nn::ParamSet params;
    const auto enc = ctx::ContextEncoder::Create(params, config, rng, true);
    cf::nn::Tape tape(&params, false);
    const Matrix v = RandomMatrix(4, 6, rng), l = RandomMatrix(5, 6, rng);
    const Matrix e = tape.value(enc.Fuse(tape, tape.Constant(v), tape.Constant(l)));
    const std::vector<Matrix> parts{v, l};
    const Matrix stacked = Plus(cf::nn::ConcatRows(parts),
                                cf::nn::SliceRows(params.value(*enc.positional()), 0, 9));
    CHECK(cf::nn::MaxAbsDiff(e, stacked) < 1e-14);
  }

  config.positional = false;
  cf::nn::ParamSet params;
  const auto enc = ctx::ContextEncoder::Create(params, config, rng);
  const Matrix v = RandomMatrix(4, 6, rng), l = RandomMatrix(5, 6, rng);
  cf::nn::Tape tape(&params, false);
  const Matrix e = tape.value(enc.Fuse(tape, tape.Constant(v), tape.Constant(l)));

  Matrix swapped_v = v;
  for (std::size_t c = 0; c < 6; ++c) std::swap(swapped_v(0, c), swapped_v(2, c));
  cf::nn::Tape t2(&params, false);
  const Matrix es = t2.value(enc.Fuse(t2, t2.Constant(swapped_v), t2.Constant(l)));
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(es(0, c) == doctest::Approx(e(2, c)).epsilon(1e-12));
    CHECK(es(2, c) == doctest::Approx(e(0, c)).epsilon(1e-12));
    CHECK(es(5, c) == doctest::Approx(e(5, c)).epsilon(1e-12));
  }

  // Reference: one residual attention block then one residual MLP.
  const std::vector<Matrix> parts{v, l};
  Matrix x = cf::nn::ConcatRows(parts);
  const auto& block = enc.blocks()[0];
  const Matrix q = Affine(params, block.attention.query, x);
  const Matrix k = Affine(params, block.attention.key, x);
  const Matrix val = Affine(params, block.attention.value, x);
  x = Plus(x, Affine(params, block.attention.output, cf::nn::ScaledDotAttention(q, k, val)));
  Matrix h = Affine(params, block.mlp.layers[0], x);
  for (auto& s : h.values()) s = std::tanh(s);
  x = Plus(x, Affine(params, block.mlp.layers[1], h));
  CHECK(cf::nn::MaxAbsDiff(e, x) < 1e-12);
}
