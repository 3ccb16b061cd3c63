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

#include "app/trainer.hpp"

#include <cmath>
#include <string>

#include "context/subtask_plan.hpp"
#include "error.hpp"
#include "nn/optim.hpp"

namespace cf::app {

namespace {

std::uint64_t StepSeed(std::uint64_t seed, std::uint64_t step) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (step + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<double> ChunkAt(const data::Trajectory& t, std::size_t step, std::size_t horizon,
                            const transition::TransitionParams& params) {
  Require(step < t.size(), ErrorCode::kDomain, "chunk start beyond the trajectory");
  const bool relabel = !t.targets.empty() && !t.boundaries.empty();
  const std::size_t subtask = relabel ? t.SubtaskAt(step) : 0;
  double reached = 0.0;
  std::vector<double> out;
  out.reserve(horizon * flow::kActionDim);
  for (std::size_t k = 0; k < horizon; ++k) {
    const std::size_t i = step + k;
    const std::size_t src = std::min(i, t.size() - 1);
    data::Action a = t.actions[src];
    if (relabel) {
      reached = std::max(reached, transition::SubtaskProgress(t.poses[src], t.wrenches[src],
                                                              t.targets[subtask], params));
      a[flow::kProgressIndex] = reached;
    }
    if (i >= t.size()) {
      a[0] = a[1] = a[2] = 0.0;
      a[3] = 1.0;
      a[4] = a[5] = a[6] = 0.0;
    }
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

TrainingSet BuildTrainingSet(const std::vector<data::Trajectory>& trajectories,
                             const std::vector<context::PromptBlock>& corpus, std::size_t horizon,
                             const transition::TransitionParams& params) {
  Require(!trajectories.empty(), ErrorCode::kMissingData, "no trajectories to train on");
  TrainingSet set;
  set.corpus = corpus;
  set.vocab = context::Vocabulary::Build(corpus);
  const auto& first = trajectories.front();
  set.layout.cameras = first.cameras.size();
  set.layout.tokens = first.camera_tokens;
  set.layout.feature_dim = first.feature_dim();

  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> actions;
  for (const auto& t : trajectories) {
    t.Validate();
    Require(t.cameras.size() == set.layout.cameras && t.camera_tokens == set.layout.tokens &&
                t.feature_dim() == set.layout.feature_dim,
            ErrorCode::kIncompatible, "trajectories disagree on the camera layout");
    for (const auto& p : t.poses) positions.push_back({p[0], p[1], p[2]});
    for (const auto& a : t.actions) actions.emplace_back(a.begin(), a.end());
  }
  set.normalizers.position = flow::Standardizer::Fit(positions);
  set.normalizers.action = flow::Standardizer::Fit(actions);

  for (const auto& t : trajectories) {
    Require(!t.boundaries.empty(), ErrorCode::kAnnotation, "trajectory lacks subtask boundaries");
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t sub = t.SubtaskAt(i);
      const context::PromptTokens prompts =
          set.vocab.Encode(t.task_prompt, t.subtask_prompts.at(sub));
      TrainingExample ex;
      ex.observation = MakeObservation(t.VisualAt(i), prompts, t.poses[i], t.wrenches[i],
                                       i > 0 ? t.progress[i - 1] : 0.0, set.normalizers);
      ex.chunk = set.normalizers.action.Apply(ChunkAt(t, i, horizon, params));
      set.examples.push_back(std::move(ex));
    }
  }
  return set;
}

TrainOutcome Train(const RunConfig& config, const TrainingSet& set,
                   std::optional<Checkpoint> resume, const TrainLogger& logger) {
  config.Validate();
  Require(!set.examples.empty(), ErrorCode::kMissingData, "training set is empty");
  const ModelSpec spec = SpecFromConfig(config, set.vocab, set.layout);
  nn::ParamSet params;
  nn::Rng init_rng(config.seed);
  const PolicyModel model = PolicyModel::Create(params, spec, init_rng);
  Require(set.examples.front().chunk.size() == spec.flow.chunk_dims(), ErrorCode::kIncompatible,
          "training chunks do not match the configured horizon");

  nn::AdamWConfig adam;
  adam.learning_rate = config.lr;
  adam.weight_decay = config.weight_decay;
  nn::OptimizerState opt = nn::OptimizerState::For(params, adam);
  nn::ParamSet ema = params;
  std::uint64_t start = 0;
  if (resume) {
    CheckCompatible(resume->config, config);
    Require(resume->params.SameLayout(params), ErrorCode::kIncompatible,
            "resume checkpoint does not match the model");
    params = resume->params;
    ema = resume->ema ? *resume->ema : params;
    if (resume->optimizer) {
      opt = *resume->optimizer;
      opt.config = adam;
    }
    start = resume->step;
  }

  TrainOutcome out;
  const std::size_t dims = spec.flow.chunk_dims();
  const double inv_batch = 1.0 / static_cast<double>(config.batch);
  for (std::uint64_t step = start; step < config.steps; ++step) {
    nn::Rng rng(StepSeed(config.seed, step));
    nn::Gradients total = params.ZerosLike();
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < config.batch; ++b) {
      const TrainingExample& ex = set.examples[rng.Index(set.examples.size())];
      const std::vector<double> noise = flow::SampleNoise(dims, rng);
      const double tau = rng.Uniform();
      nn::Tape tape(&params);
      nn::Var loss = model.Loss(tape, ex.observation, ex.chunk, noise, tau);
      tape.Backward(loss);
      loss_sum += tape.value(loss)(0, 0);
      const nn::Gradients g = tape.ParamGradients();
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto dst = total[i].values();
        const auto src = g[i].values();
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j] * inv_batch;
      }
    }
    const double loss = loss_sum * inv_batch;
    Require(std::isfinite(loss), ErrorCode::kNumeric,
            "training loss became non-finite at step " + std::to_string(step));
    const double lr = nn::CosineLr(step, config.steps, config.lr);
    nn::AdamWStep(params, total, opt, lr);
    nn::EmaUpdate(ema, params, config.ema);
    out.losses.push_back(loss);
    if (logger) logger(step, loss, lr);
  }

  out.model.config = config;
  out.model.corpus = set.corpus;
  out.model.normalizers = set.normalizers;
  out.model.params = params;
  out.model.optimizer = opt;
  out.model.ema = ema;
  out.model.step = std::max<std::uint64_t>(start, config.steps);
  out.ema = out.model;
  out.ema.params = ema;
  out.ema.optimizer.reset();
  out.ema.ema.reset();
  return out;
}

double EvaluateLoss(const PolicyModel& model, const nn::ParamSet& params, const TrainingSet& set,
                    std::size_t count, std::uint64_t seed) {
  Require(!set.examples.empty() && count > 0, ErrorCode::kMissingData, "nothing to evaluate");
  nn::Rng rng(seed);
  const std::size_t dims = model.spec().flow.chunk_dims();
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const TrainingExample& ex = set.examples[rng.Index(set.examples.size())];
    const auto noise = flow::SampleNoise(dims, rng);
    const double tau = rng.Uniform();
    nn::Tape tape(&params, false);
    sum += tape.value(model.Loss(tape, ex.observation, ex.chunk, noise, tau))(0, 0);
  }
  return sum / static_cast<double>(count);
}

}  // namespace cf::app
