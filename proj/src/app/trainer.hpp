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

#ifndef CONTACTFLOW_APP_TRAINER_HPP_
#define CONTACTFLOW_APP_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "app/checkpoint.hpp"
#include "app/config.hpp"
#include "app/policy.hpp"
#include "data/trajectory.hpp"

namespace cf::app {

struct TrainingExample {
  Observation observation;
  std::vector<double> chunk;  // standardized, horizon x 14
};

struct TrainingSet {
  std::vector<context::PromptBlock> corpus;
  context::Vocabulary vocab;
  sim::VisualLayout layout;
  Normalizers normalizers;
  std::vector<TrainingExample> examples;
};

// Action chunk starting at `step`; steps past the end repeat the final
// command with a zero pose delta.
// Raw chunk starting at `step`. Steps past the end repeat the final command
// with a zero pose delta. When the trajectory stores subtask targets, element
// k carries the highest progress towards the subtask active at `step` seen
// over elements 0..k, so it says whether that subtask has been completed.
std::vector<double> ChunkAt(const data::Trajectory& t, std::size_t step, std::size_t horizon,
                            const transition::TransitionParams& params = {});

TrainingSet BuildTrainingSet(const std::vector<data::Trajectory>& trajectories,
                             const std::vector<context::PromptBlock>& corpus, std::size_t horizon,
                             const transition::TransitionParams& params = {});

using TrainLogger = std::function<void(std::uint64_t step, double loss, double lr)>;

struct TrainOutcome {
  Checkpoint model;
  Checkpoint ema;
  std::vector<double> losses;  // one per step run in this call
};

// AdamW with cosine decay and an EMA copy. Resuming continues the step count
// and reproduces an uninterrupted run. Throws kNumeric on a non-finite loss.
TrainOutcome Train(const RunConfig& config, const TrainingSet& set,
                   std::optional<Checkpoint> resume = std::nullopt,
                   const TrainLogger& logger = nullptr);

// Mean loss of the model over a fixed seeded draw of examples.
double EvaluateLoss(const PolicyModel& model, const nn::ParamSet& params, const TrainingSet& set,
                    std::size_t count, std::uint64_t seed);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_TRAINER_HPP_
