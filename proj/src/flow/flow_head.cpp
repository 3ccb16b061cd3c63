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

#include "flow/flow_head.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace cf::flow {

std::array<double, kActionDim> PackAction(const ActionVector& action) {
  std::array<double, kActionDim> out{};
  std::copy(action.pose_delta.begin(), action.pose_delta.end(), out.begin());
  std::copy(action.wrench.begin(), action.wrench.end(), out.begin() + 7);
  out[kProgressIndex] = action.progress;
  return out;
}

ActionVector DecomposeAction(std::span<const double> raw) {
  Require(raw.size() == kActionDim, ErrorCode::kDimension,
          "action vector must have 14 entries, got " + std::to_string(raw.size()));
  for (double v : raw) Require(std::isfinite(v), ErrorCode::kNumeric, "action is not finite");
  ActionVector a;
  std::copy(raw.begin(), raw.begin() + 7, a.pose_delta.begin());
  const geom::Quat q = geom::QuatNormalize(geom::Orientation(a.pose_delta));
  std::copy(q.begin(), q.end(), a.pose_delta.begin() + 3);
  std::copy(raw.begin() + 7, raw.begin() + 13, a.wrench.begin());
  a.progress = std::clamp(raw[kProgressIndex], 0.0, 1.0);
  return a;
}

std::vector<double> SampleNoise(std::size_t dims, nn::Rng& rng) {
  Require(dims > 0, ErrorCode::kDomain, "noise needs at least one dimension");
  std::vector<double> out(dims);
  for (double& v : out) v = rng.Normal();
  return out;
}

FlowSample FlowTrainTarget(std::span<const double> action, std::span<const double> noise,
                           double tau) {
  Require(action.size() == noise.size(), ErrorCode::kDimension,
          "action and noise sizes differ");
  Require(tau >= 0.0 && tau <= 1.0, ErrorCode::kDomain,
          "denoising time " + std::to_string(tau) + " outside [0, 1]");
  FlowSample s;
  s.noise.assign(noise.begin(), noise.end());
  s.tau = tau;
  s.interpolant.resize(action.size());
  s.velocity.resize(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    s.interpolant[i] = (1.0 - tau) * noise[i] + tau * action[i];
    s.velocity[i] = action[i] - noise[i];
  }
  return s;
}

std::vector<double> EulerIntegrate(std::span<const double> start, std::size_t steps,
                                   const VelocityField& field) {
  Require(steps >= 1, ErrorCode::kDomain, "Euler integration needs at least one step");
  std::vector<double> a(start.begin(), start.end());
  const double dt = 1.0 / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tau = static_cast<double>(k) * dt;
    const std::vector<double> v = field(a, tau);
    Require(v.size() == a.size(), ErrorCode::kDimension, "velocity field changed dimension");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += dt * v[i];
  }
  return a;
}

std::vector<double> TimeFeatures(double tau, std::size_t count) {
  std::vector<double> out(count);
  const std::size_t pairs = count / 2;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double w = std::numbers::pi * std::pow(2.0, static_cast<double>(k) * 0.5);
    out[2 * k] = std::sin(w * tau);
    out[2 * k + 1] = std::cos(w * tau);
  }
  if (count % 2 == 1) out[count - 1] = tau;
  return out;
}

Standardizer Standardizer::Identity(std::size_t dims) {
  return {std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)};
}

Standardizer Standardizer::Fit(std::span<const std::vector<double>> samples) {
  Require(!samples.empty(), ErrorCode::kDomain, "cannot fit statistics on zero samples");
  const std::size_t d = samples.front().size();
  Standardizer s = Identity(d);
  for (const auto& x : samples) {
    Require(x.size() == d, ErrorCode::kDimension, "ragged samples");
    for (std::size_t i = 0; i < d; ++i) s.mean[i] += x[i];
  }
  const double n = static_cast<double>(samples.size());
  for (double& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& x : samples)
    for (std::size_t i = 0; i < d; ++i) var[i] += (x[i] - s.mean[i]) * (x[i] - s.mean[i]);
  for (std::size_t i = 0; i < d; ++i) {
    const double sd = std::sqrt(var[i] / n);
    s.scale[i] = sd > 1e-12 ? sd : 0.0;
  }
  return s;
}

std::vector<double> Standardizer::Apply(std::span<const double> x) const {
  Require(x.size() % dims() == 0, ErrorCode::kDimension, "standardizer dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t j = i % dims();
    out[i] = scale[j] > 0.0 ? (x[i] - mean[j]) / scale[j] : x[i] - mean[j];
  }
  return out;
}

std::vector<double> Standardizer::Invert(std::span<const double> z) const {
  Require(z.size() % dims() == 0, ErrorCode::kDimension, "standardizer dimension mismatch");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t j = i % dims();
    out[i] = scale[j] > 0.0 ? z[i] * scale[j] + mean[j] : mean[j];
  }
  return out;
}

FlowHead FlowHead::Create(nn::ParamSet& params, const FlowConfig& config, nn::Rng& rng) {
  Require(config.horizon >= 1, ErrorCode::kDomain, "chunk horizon must be at least 1");
  FlowHead h;
  h.config_ = config;
  const std::size_t d = config.cond_width;
  h.context_proj_ = nn::Linear::Create(params, "flow.context", d, d, rng);
  h.readout_query_ = params.Add("flow.readout", nn::UniformInit(1, d, d, rng));
  std::vector<std::size_t> widths{config.chunk_dims() + config.time_features + 2 * d +
                                  (config.condition_on_progress ? 1u : 0u)};
  for (std::size_t i = 0; i < config.hidden_layers; ++i) widths.push_back(config.hidden);
  widths.push_back(config.chunk_dims());
  h.velocity_ = nn::Mlp::Create(params, "flow.velocity", widths, rng, config.zero_last);
  return h;
}

nn::Var FlowHead::Pool(nn::Tape& tape, nn::Var moe_tokens) const {
  Require(tape.value(moe_tokens).rows() > 0, ErrorCode::kDomain, "no conditioning tokens");
  nn::Var ctx = context_proj_.Apply(tape, moe_tokens);
  nn::Var mean = tape.MeanRows(ctx);
  nn::Var readout = nn::Attend(tape, tape.Param(readout_query_), ctx, ctx);
  const std::array<nn::Var, 2> parts{mean, readout};
  return tape.ConcatCols(parts);
}

nn::Var FlowHead::Velocity(nn::Tape& tape, nn::Var a_tau, double tau, nn::Var pooled,
                           std::optional<double> progress) const {
  const nn::Matrix& a = tape.value(a_tau);
  Require(a.rows() == 1 && a.cols() == config_.chunk_dims(), ErrorCode::kDimension,
          "action chunk " + a.ShapeString() + " does not match horizon " +
              std::to_string(config_.horizon));
  Require(tape.value(pooled).cols() == 2 * config_.cond_width, ErrorCode::kDimension,
          "pooled conditioning has the wrong width");
  Require(progress.has_value() == config_.condition_on_progress, ErrorCode::kDimension,
          "progress conditioning does not match the head configuration");
  std::vector<nn::Var> parts{a_tau,
                             tape.Constant(nn::Matrix::RowVector(TimeFeatures(tau, config_.time_features))),
                             pooled};
  if (progress) parts.push_back(tape.Constant(nn::Matrix(1, 1, *progress)));
  return velocity_.Apply(tape, tape.ConcatCols(parts));
}

std::vector<double> FlowHead::Sample(const nn::ParamSet& params, const nn::Matrix& pooled,
                                     std::span<const double> noise, std::size_t steps,
                                     std::optional<double> progress) const {
  return EulerIntegrate(noise, steps, [&](std::span<const double> a, double tau) {
    nn::Tape tape(&params, false);
    nn::Var v = Velocity(tape, tape.Constant(nn::Matrix::RowVector(a)), tau,
                         tape.Constant(pooled), progress);
    return tape.value(v).storage();
  });
}

nn::Var FlowMatchingLoss(nn::Tape& tape, nn::Var predicted, nn::Var target) {
  Require(tape.value(predicted).SameShape(tape.value(target)), ErrorCode::kDimension,
          "prediction and target shapes differ");
  const double n = static_cast<double>(tape.value(predicted).size());
  return tape.Scale(tape.SumSquares(tape.Sub(predicted, target)), 1.0 / n);
}

}  // namespace cf::flow
