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
#include "flow/flow_head.hpp"
#include "nn/layers.hpp"
#include "nn/optim.hpp"
#include "nn/rng.hpp"
#include "nn/tape.hpp"

using cf::nn::Matrix;
namespace fl = cf::flow;

TEST_CASE("noise draws") {
  cf::nn::Rng a(9), b(9);
  CHECK(fl::SampleNoise(16, a) == fl::SampleNoise(16, b));
  cf::nn::Rng rng(10);
  const auto draws = fl::SampleNoise(1000000, rng);
  double mean = 0.0, sq = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  for (double v : draws) sq += (v - mean) * (v - mean);
  const double var = sq / static_cast<double>(draws.size() - 1);
  CHECK(std::abs(mean) < 0.01);
  CHECK(var > 0.99);
  CHECK(var < 1.01);
  CHECK_THROWS_AS(fl::SampleNoise(0, rng), cf::Error);
}

TEST_CASE("training target") {
  const std::vector<double> action{2.0, -1.0}, noise{0.0, 3.0};
  auto s = fl::FlowTrainTarget(action, noise, 0.0);
  CHECK(s.interpolant == noise);
  s = fl::FlowTrainTarget(action, noise, 1.0);
  CHECK(s.interpolant == action);
  s = fl::FlowTrainTarget(action, noise, 0.5);
  CHECK(s.interpolant[0] == 1.0);
  CHECK(s.velocity[0] == 2.0);
  CHECK(s.velocity[1] == -4.0);
  CHECK_THROWS_AS(fl::FlowTrainTarget(action, noise, 1.5), cf::Error);
}

TEST_CASE("euler integration") {
  const std::vector<double> zero{0.0, 0.0};
  for (std::size_t n : {1u, 3u, 10u, 64u}) {
    const auto out = fl::EulerIntegrate(zero, n, [](std::span<const double>, double) {
      return std::vector<double>{0.7, -1.3};
    });
    CHECK(out[0] == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(-1.3).epsilon(1e-14));
  }
  auto linear = [](std::span<const double> a, double) {
    return std::vector<double>(a.begin(), a.end());
  };
  const std::vector<double> one{1.0};
  CHECK(fl::EulerIntegrate(one, 10, linear)[0] == doctest::Approx(2.5937424601).epsilon(1e-12));

  auto smooth = [](std::span<const double> a, double tau) {
    return std::vector<double>{std::cos(3.0 * tau) - 0.5 * a[0]};
  };
  const double reference = fl::EulerIntegrate(one, 1024, smooth)[0];
  double prev = std::abs(fl::EulerIntegrate(one, 16, smooth)[0] - reference);
  for (std::size_t n = 32; n <= 128; n *= 2) {
    const double err = std::abs(fl::EulerIntegrate(one, n, smooth)[0] - reference);
    CHECK(prev / err > 1.7);
    CHECK(prev / err < 2.5);
    prev = err;
  }
}

TEST_CASE("action decomposition") {
  const std::vector<double> zero(fl::kActionDim, 0.0);
  const auto a = fl::DecomposeAction(zero);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.pose_delta[i] == 0.0);
  for (double w : a.wrench) CHECK(w == 0.0);
  CHECK(a.progress == 0.0);

  std::vector<double> over(fl::kActionDim, 0.0);
  over[3] = 1.0;
  over[fl::kProgressIndex] = 1.7;
  CHECK(fl::DecomposeAction(over).progress == 1.0);

  fl::ActionVector v;
  v.pose_delta = {0.01, -0.02, 0.003, 2.0, 0.0, 0.0, 0.0};
  v.wrench = {1, 2, 3, 0.1, 0.2, 0.3};
  v.progress = 0.4;
  const auto packed = fl::PackAction(v);
  const auto back = fl::DecomposeAction(packed);
  CHECK(back.pose_delta[3] == 1.0);
  CHECK(back.pose_delta[0] == v.pose_delta[0]);
  CHECK(back.wrench == v.wrench);
  CHECK(back.progress == v.progress);

  CHECK_THROWS_AS(fl::DecomposeAction(std::vector<double>(13, 0.0)), cf::Error);
}

TEST_CASE("standardizer") {
  const std::vector<std::vector<double>> samples{{1, 5}, {3, 5}, {5, 5}};
  const auto s = fl::Standardizer::Fit(samples);
  CHECK(s.mean[0] == 3.0);
  CHECK(s.scale[1] == 0.0);
  const std::vector<double> x{4.0, 7.0};
  const auto z = s.Apply(x);
  CHECK(z[1] == 2.0);
  const auto back = s.Invert(z);
  CHECK(back[0] == doctest::Approx(4.0));
  CHECK(back[1] == 5.0);
}

TEST_CASE("velocity field") {
  fl::FlowConfig config;
  config.horizon = 2;
  config.cond_width = 4;
  config.hidden = 8;
  config.time_features = 6;
  config.zero_last = true;
  cf::nn::ParamSet params;
  cf::nn::Rng rng(12);
  const auto head = fl::FlowHead::Create(params, config, rng);
  const auto noise = fl::SampleNoise(config.chunk_dims(), rng);
  Matrix pooled(1, 8);
  for (auto& v : pooled.values()) v = rng.Normal();
  {
    cf::nn::Tape t(&params, false);
    const Matrix v = t.value(head.Velocity(t, t.Constant(Matrix::RowVector(noise)), 0.3,
                                           t.Constant(pooled)));
    for (double x : v.values()) CHECK(x == 0.0);
  }
  // Zero velocity and a noise-valued chunk give zero loss.
  {
    cf::nn::Tape t(&params, false);
    auto pred = head.Velocity(t, t.Constant(Matrix::RowVector(noise)), 0.3, t.Constant(pooled));
    const auto target = fl::FlowTrainTarget(noise, noise, 0.3);
    auto loss = fl::FlowMatchingLoss(t, pred, t.Constant(Matrix::RowVector(target.velocity)));
    CHECK(t.value(loss)(0, 0) == 0.0);
  }

  config.zero_last = false;
  cf::nn::ParamSet p2;
  const auto live = fl::FlowHead::Create(p2, config, rng);
  cf::nn::Tape a(&p2, false), b(&p2, false);
  const Matrix va = a.value(live.Velocity(a, a.Constant(Matrix::RowVector(noise)), 0.6,
                                          a.Constant(pooled)));
  const Matrix vb = b.value(live.Velocity(b, b.Constant(Matrix::RowVector(noise)), 0.6,
                                          b.Constant(pooled)));
  CHECK(va == vb);
  std::vector<double> input = noise;
  const auto tf = fl::TimeFeatures(0.6, config.time_features);
  input.insert(input.end(), tf.begin(), tf.end());
  input.insert(input.end(), pooled.values().begin(), pooled.values().end());
  const Matrix ref = cf::nn::MlpForward(p2, live.velocity_mlp(), Matrix::RowVector(input));
  CHECK(cf::nn::MaxAbsDiff(va, ref) < 1e-14);

  cf::nn::Tape c(&p2, false);
  auto pred = c.Constant(Matrix{{1.0, -2.0}});
  auto loss = fl::FlowMatchingLoss(c, pred, c.Constant(Matrix{{0.0, 0.0}}));
  CHECK(c.value(loss)(0, 0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(live.Velocity(c, c.Constant(Matrix(1, 3)), 0.1, c.Constant(pooled)), cf::Error);
}

TEST_CASE("two-target toy flow") {
  // Velocity net over [a, time features, one-hot context] trained by flow matching.
  const std::vector<std::array<double, 2>> targets{{{1.0, -1.0}}, {{-1.0, 0.5}}};
  constexpr std::size_t kTime = 8;
  cf::nn::ParamSet params;
  cf::nn::Rng rng(21);
  const std::vector<std::size_t> widths{2 + kTime + 2, 64, 64, 2};
  const auto net = cf::nn::Mlp::Create(params, "toy", widths, rng);
  auto features = [&](std::span<const double> a, double tau, std::size_t label) {
    std::vector<double> in(a.begin(), a.end());
    const auto tf = fl::TimeFeatures(tau, kTime);
    in.insert(in.end(), tf.begin(), tf.end());
    in.push_back(label == 0 ? 1.0 : 0.0);
    in.push_back(label == 1 ? 1.0 : 0.0);
    return in;
  };

  auto state = cf::nn::OptimizerState::For(params);
  constexpr std::size_t kSteps = 5000, kBatch = 16;
  for (std::size_t step = 0; step < kSteps; ++step) {
    Matrix inputs(kBatch, widths.front()), velocity(kBatch, 2);
    for (std::size_t b = 0; b < kBatch; ++b) {
      const std::size_t label = rng.Index(2);
      const auto noise = fl::SampleNoise(2, rng);
      const auto s = fl::FlowTrainTarget(targets[label], noise, rng.Uniform());
      const auto in = features(s.interpolant, s.tau, label);
      std::copy(in.begin(), in.end(), inputs.row(b).begin());
      std::copy(s.velocity.begin(), s.velocity.end(), velocity.row(b).begin());
    }
    cf::nn::Tape tape(&params);
    auto loss = fl::FlowMatchingLoss(tape, net.Apply(tape, tape.Constant(inputs)),
                                     tape.Constant(velocity));
    tape.Backward(loss);
    cf::nn::AdamWStep(params, tape.ParamGradients(), state,
                      cf::nn::CosineLr(step, kSteps, 3e-3));
  }

  std::size_t hits = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const std::size_t label = i % 2;
    const auto out = fl::EulerIntegrate(fl::SampleNoise(2, rng), 20,
                                        [&](std::span<const double> a, double tau) {
      return net.Eval(params, Matrix::RowVector(features(a, tau, label))).storage();
    });
    const double dx = out[0] - targets[label][0], dy = out[1] - targets[label][1];
    if (std::sqrt(dx * dx + dy * dy) < 0.1) ++hits;
  }
  CHECK(hits >= 950);
}
