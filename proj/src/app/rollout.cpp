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

#include "app/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace cf::app {

LearnedPolicy::LearnedPolicy(const LoadedPolicy& policy, const nn::ParamSet& params,
                             std::uint64_t seed)
    : policy_(policy), params_(params), rng_(seed) {}

std::vector<flow::ActionVector> LearnedPolicy::Act(const StepContext& ctx) {
  const geom::Pose7 pose = ctx.state.pose7();
  const auto prompts =
      policy_.vocab.Encode(ctx.scene.prompts.task_prompt, ctx.plan.current_prompt());
  const Normalizers& norm = policy_.checkpoint.normalizers;
  const Observation obs =
      MakeObservation(sim::RenderVisual(ctx.scene.object, pose, policy_.layout), prompts, pose,
                      ctx.force_sensing ? ctx.state.wrench : geom::Wrench{}, ctx.progress, norm);
  const std::size_t dims = policy_.model.spec().flow.chunk_dims();
  const std::vector<double> noise = flow::SampleNoise(dims, rng_);
  const std::vector<double> raw = norm.action.Invert(policy_.model.Sample(params_, obs, noise));
  std::vector<flow::ActionVector> chunk;
  for (std::size_t k = 0; k < policy_.model.spec().flow.horizon; ++k)
    chunk.push_back(flow::DecomposeAction(
        std::span<const double>(raw).subspan(k * flow::kActionDim, flow::kActionDim)));
  return chunk;
}

std::vector<flow::ActionVector> ScriptedPolicy::Act(const StepContext& ctx) {
  flow::ActionVector a = sim::ExpertAction(ctx.scene, ctx.plan.index, ctx.state);
  a.progress = transition::SubtaskProgress(ctx.state.pose7(), ctx.state.wrench,
                                           ctx.scene.targets.at(ctx.plan.index), params_);
  return {a};
}

std::vector<flow::ActionVector> ZeroPolicy::Act(const StepContext&) {
  flow::ActionVector a;
  a.pose_delta = {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  return {a};
}

EpisodeResult RunEpisode(const sim::TaskScene& scene, ActionSource& source,
                         const EpisodeOptions& options) {
  const sim::EpisodeConfig& cfg = options.episode;
  sim::Environment env(scene.env, scene.start, options.perturbation);
  sim::EpisodeMonitor monitor(scene);
  monitor.Observe(env.state(), env.params());
  context::SubtaskPlan plan = context::SubtaskPlan::FromBlock(scene.prompts);
  Require(plan.size() == scene.targets.size(), ErrorCode::kDimension,
          "subtask plan and scene targets disagree");
  transition::TransitionState ts{0, plan.size(), 0.0, cfg.threshold};

  std::size_t step = 0;
  bool done = false;
  while (!done && step < cfg.max_steps) {
    const StepContext ctx{scene, env.state(), plan, ts.progress,
                          options.execution == Execution::kHybrid};
    const std::vector<flow::ActionVector> chunk = source.Act(ctx);
    Require(!chunk.empty(), ErrorCode::kDimension, "policy returned an empty chunk");
    double last_progress = 0.0;
    for (const flow::ActionVector& a : chunk) {
      if (step >= cfg.max_steps) break;
      if (options.execution == Execution::kPositionOnly)
        env.StepPosition(sim::ApplyDelta(env.state().pose7(), a.pose_delta));
      else
        env.StepHybrid(a, cfg.gains);
      monitor.Observe(env.state(), env.params());
      ++step;
      last_progress = a.progress;
      // Replan with the next prompt as soon as the subtask is predicted done.
      if (last_progress >= cfg.threshold) break;
    }
    // The subtask decision uses the progress of the last executed element.
    done = ts.terminal() && last_progress >= cfg.threshold;
    ts = transition::SubtaskStep(ts, last_progress);
    plan.index = ts.index;
  }
  EpisodeResult r;
  r.seed = scene.seed;
  r.final_subtask = ts.index;
  r.metrics.steps = step;
  r.metrics.overloads = env.overloads();
  r.metrics.peak_force = env.peak_force();
  r.metrics.force_rms = env.force_rms();
  r.metrics.success = monitor.Success(env.state(), env.params(), env.overloads());
  return r;
}

sim::EnvParams EnvFromConfig(const RunConfig& config) {
  sim::EnvParams env;
  env.stiffness = config.stiffness;
  env.damping = config.damping;
  env.friction = config.friction;
  env.force_limit = config.force_limit;
  return env;
}

EpisodeOptions OptionsFromConfig(const RunConfig& config) {
  EpisodeOptions o;
  o.episode.transition.alpha = config.alpha;
  o.episode.transition.rate = config.rate;
  o.episode.transition.force = {config.force_lower, config.force_upper};
  o.episode.threshold = config.threshold;
  o.episode.max_steps = config.max_steps;
  o.episode.gains.admittance = config.admittance;
  if (config.perturb) o.perturbation = sim::SurfaceRise{};
  return o;
}

std::uint64_t EvaluationSeed(std::uint64_t base, std::size_t episode) {
  return base + 1000003ULL + 7919ULL * episode;
}

std::vector<EpisodeResult> RunEpisodes(const RunConfig& config, PolicyKind kind,
                                       const LoadedPolicy* policy, const nn::ParamSet* params,
                                       const EpisodeOptions& options) {
  Require(kind != PolicyKind::kLearned || (policy && params), ErrorCode::kUsage,
          "a learned rollout needs a checkpoint");
  const sim::TaskKind task = sim::ParseTask(config.task);
  const sim::EnvParams env = EnvFromConfig(config);
  std::vector<EpisodeResult> results(config.episodes);
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(config.episodes);
  auto worker = [&] {
    for (std::size_t e = next++; e < config.episodes; e = next++) {
      try {
        const std::uint64_t seed = EvaluationSeed(config.seed, e);
        const sim::TaskScene scene = sim::MakeScene(task, seed, env);
        std::unique_ptr<ActionSource> source;
        switch (kind) {
          case PolicyKind::kLearned:
            source = std::make_unique<LearnedPolicy>(*policy, *params, seed ^ 0xabcdefULL);
            break;
          case PolicyKind::kScripted:
            source = std::make_unique<ScriptedPolicy>(options.episode.transition);
            break;
          case PolicyKind::kZero:
            source = std::make_unique<ZeroPolicy>();
            break;
        }
        results[e] = RunEpisode(scene, *source, options);
      } catch (const std::exception& ex) {
        errors[e] = ex.what();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, config.episodes));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t e = 0; e < errors.size(); ++e)
    Require(errors[e].empty(), ErrorCode::kNumeric,
            "episode " + std::to_string(e) + " failed: " + errors[e]);
  return results;
}

RolloutSummary Summarize(const std::vector<EpisodeResult>& results) {
  RolloutSummary s;
  if (results.empty()) return s;
  std::size_t ok = 0, over = 0;
  double rms = 0.0;
  for (const auto& r : results) {
    ok += r.metrics.success ? 1 : 0;
    over += r.metrics.overloads > 0 ? 1 : 0;
    s.overloads += r.metrics.overloads;
    rms += r.metrics.force_rms;
  }
  const double n = static_cast<double>(results.size());
  s.success_rate = static_cast<double>(ok) / n;
  s.overload_episode_rate = static_cast<double>(over) / n;
  s.mean_force_rms = rms / n;
  return s;
}

std::string FormatRolloutCsv(const std::vector<EpisodeResult>& results) {
  std::ostringstream out;
  out << "episode,seed,success,overloads,force_rms,steps,peak_force,final_subtask\n";
  char buf[256];
  for (std::size_t e = 0; e < results.size(); ++e) {
    const auto& r = results[e];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%d,%zu,%.6f,%zu,%.6f,%zu\n", e,
                  static_cast<unsigned long long>(r.seed), r.metrics.success ? 1 : 0,
                  r.metrics.overloads, r.metrics.force_rms, r.metrics.steps, r.metrics.peak_force,
                  r.final_subtask);
    out << buf;
  }
  const RolloutSummary s = Summarize(results);
  std::snprintf(buf, sizeof buf, "summary,,%.6f,%zu,%.6f,,,\n", s.success_rate, s.overloads,
                s.mean_force_rms);
  out << buf;
  return out.str();
}

}  // namespace cf::app
