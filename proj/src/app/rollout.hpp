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

#ifndef CONTACTFLOW_APP_ROLLOUT_HPP_
#define CONTACTFLOW_APP_ROLLOUT_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "app/checkpoint.hpp"
#include "context/subtask_plan.hpp"
#include "sim/demonstrator.hpp"

namespace cf::app {

enum class Execution { kHybrid, kPositionOnly };

struct StepContext {
  const sim::TaskScene& scene;
  const sim::SimState& state;
  const context::SubtaskPlan& plan;
  double progress = 0.0;
  bool force_sensing = true;  // false: the policy sees a zero wrench
};

// Produces a chunk of commands per call; the episode executes it open loop.
class ActionSource {
 public:
  virtual ~ActionSource() = default;
  virtual std::vector<flow::ActionVector> Act(const StepContext& ctx) = 0;
};

class LearnedPolicy : public ActionSource {
 public:
  // `params` selects the weights (raw or averaged); both must outlive this.
  LearnedPolicy(const LoadedPolicy& policy, const nn::ParamSet& params, std::uint64_t seed);
  std::vector<flow::ActionVector> Act(const StepContext& ctx) override;

 private:
  const LoadedPolicy& policy_;
  const nn::ParamSet& params_;
  nn::Rng rng_;
};

// The demonstrator's command with its ground-truth progress label.
class ScriptedPolicy : public ActionSource {
 public:
  explicit ScriptedPolicy(transition::TransitionParams params) : params_(params) {}
  std::vector<flow::ActionVector> Act(const StepContext& ctx) override;

 private:
  transition::TransitionParams params_;
};

class ZeroPolicy : public ActionSource {
 public:
  std::vector<flow::ActionVector> Act(const StepContext& ctx) override;
};

struct EpisodeOptions {
  sim::EpisodeConfig episode;
  Execution execution = Execution::kHybrid;
  std::optional<sim::SurfaceRise> perturbation;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  sim::RolloutMetrics metrics;
  std::size_t final_subtask = 0;
};

EpisodeResult RunEpisode(const sim::TaskScene& scene, ActionSource& source,
                         const EpisodeOptions& options);

EpisodeOptions OptionsFromConfig(const RunConfig& config);
sim::EnvParams EnvFromConfig(const RunConfig& config);

// Seeds used for evaluation scenes never overlap the demonstration seeds.
std::uint64_t EvaluationSeed(std::uint64_t base, std::size_t episode);

enum class PolicyKind { kLearned, kScripted, kZero };

// Runs `episodes` scenes, up to `jobs` at a time; results are in episode order.
std::vector<EpisodeResult> RunEpisodes(const RunConfig& config, PolicyKind kind,
                                       const LoadedPolicy* policy, const nn::ParamSet* params,
                                       const EpisodeOptions& options);

std::string FormatRolloutCsv(const std::vector<EpisodeResult>& results);

struct RolloutSummary {
  double success_rate = 0.0;
  double overload_episode_rate = 0.0;  // fraction with at least one overload
  std::size_t overloads = 0;
  double mean_force_rms = 0.0;
};

RolloutSummary Summarize(const std::vector<EpisodeResult>& results);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_ROLLOUT_HPP_
