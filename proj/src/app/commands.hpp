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

#ifndef CONTACTFLOW_APP_COMMANDS_HPP_
#define CONTACTFLOW_APP_COMMANDS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/rollout.hpp"
#include "data/trajectory.hpp"
#include "error.hpp"

namespace cf::app {

// Exit codes shared by the command-line tool and the C API.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitMissingData = 3,
  kExitNumeric = 4,
  kExitIncompatible = 5,
};

int ExitCodeFor(ErrorCode code);

// Each command writes its artifacts and returns the text it would print.

// Writes config.demos expert trajectories, manifest.txt and prompts.txt.
std::string CmdGenerate(const RunConfig& config, const std::string& out_dir);

std::vector<data::Trajectory> LoadDataset(const std::string& data_dir,
                                          std::vector<context::PromptBlock>* corpus);

struct TrainPaths {
  std::string data_dir;
  std::string out_dir;
  std::string resume;  // empty for a fresh run
};

// Writes loss.csv, model.ckpt and model_ema.ckpt into out_dir.
std::string CmdTrain(const RunConfig& config, const TrainPaths& paths);

struct RolloutRequest {
  PolicyKind policy = PolicyKind::kLearned;
  Execution execution = Execution::kHybrid;
  std::string checkpoint;  // learned policy only
  std::string out_csv;     // empty: returned only
};

// `config` supplies the environment, seed, task and episode count; the model
// comes from the checkpoint.
std::string CmdRollout(const RunConfig& config, const RolloutRequest& request);

PolicyKind ParsePolicyKind(std::string_view name);
Execution ParseExecution(std::string_view name);

struct AblationVariant {
  std::string name;
  RunConfig config;
};

// components (4 rows), moe_modality (3 rows) or injection (3 rows).
std::vector<AblationVariant> AblationSuite(std::string_view suite, const RunConfig& base);

std::string CmdAblate(const RunConfig& config, std::string_view suite,
                      const std::string& data_dir, const std::string& out_csv);

struct AnalyzeRequest {
  std::size_t samples = 10000;
  std::string out_csv;
};

std::string CmdAnalyze(const RunConfig& config, const AnalyzeRequest& request);

// One row per window: file,window,start,end,label.
std::string CmdSegment(const std::vector<std::string>& paths, std::size_t window,
                       const std::string& out_csv);

std::string CmdStats(const std::vector<std::string>& paths, const std::string& out_csv);

}  // namespace cf::app

#endif  // CONTACTFLOW_APP_COMMANDS_HPP_
