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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app/checkpoint.hpp"
#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/rollout.hpp"
#include "app/trainer.hpp"
#include "app/verify.hpp"
#include "data/trajectory_io.hpp"
#include "doctest.h"
#include "error.hpp"
#include "sim/demonstrator.hpp"

namespace app = cf::app;
namespace fs = std::filesystem;

namespace {

cf::ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const cf::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return cf::ErrorCode::kUsage;
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cf_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

app::RunConfig Tiny() {
  app::RunConfig c;
  c.demos = 6;
  c.steps = 50;
  c.batch = 4;
  c.width = 8;
  c.heads = 1;
  c.blocks = 1;
  c.chunk = 3;
  c.flow_hidden = 16;
  c.flow_layers = 1;
  c.time_features = 4;
  c.euler_steps = 3;
  c.episodes = 3;
  return c;
}

}  // namespace

TEST_CASE("config text") {
  auto c = app::ParseConfig("# comment\nseed = 7\nlr=0.01\nmoe_visual = off\n");
  CHECK(c.seed == 7);
  CHECK(c.lr == 0.01);
  CHECK_FALSE(c.moe_visual);
  CHECK(app::ParseConfig(app::FormatConfig(c)).lr == c.lr);
  CHECK(CodeOf([] { app::ParseConfig("bogus = 1\n"); }) == cf::ErrorCode::kUsage);
  CHECK(CodeOf([] { app::ParseConfig("steps = many\n"); }) == cf::ErrorCode::kUsage);
  CHECK(CodeOf([] { app::ParseConfig("chunk = 0\n").Validate(); }) == cf::ErrorCode::kUsage);

  app::SetConfigValue(c, "chunk", "12");
  CHECK(c.chunk == 12);
  ::setenv("FOCA_SEED", "1234", 1);
  app::ApplyEnvironmentOverrides(c);
  ::unsetenv("FOCA_SEED");
  CHECK(c.seed == 1234);
  app::ApplyFullScale(c);
  CHECK(c.steps == 30000);
  CHECK(c.batch == 32);
  CHECK(c.seed == 42);
}

TEST_CASE("exit codes") {
  CHECK(app::ExitCodeFor(cf::ErrorCode::kUsage) == 2);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kDomain) == 2);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kMissingData) == 3);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kChecksum) == 3);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kGap) == 3);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kNumeric) == 4);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kDimension) == 5);
  CHECK(app::ExitCodeFor(cf::ErrorCode::kIncompatible) == 5);
}

TEST_CASE("training chunks") {
  const auto scene = cf::sim::MakeScene(cf::sim::TaskKind::kPress, 3);
  const auto t = cf::sim::RunDemonstration(scene, {}).trajectory;
  const std::size_t h = 8;
  const auto chunk = app::ChunkAt(t, t.size() - 2, h);
  REQUIRE(chunk.size() == h * cf::flow::kActionDim);
  for (std::size_t k = 2; k < h; ++k) {
    const double* a = chunk.data() + k * cf::flow::kActionDim;
    CHECK(a[0] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == 1.0);
    CHECK(a[9] == t.actions.back()[9]);
  }
  // Progress within a chunk never decreases.
  for (std::size_t step = 0; step < t.size(); step += 3) {
    const auto c = app::ChunkAt(t, step, h);
    for (std::size_t k = 1; k < h; ++k)
      CHECK(c[k * cf::flow::kActionDim + cf::flow::kProgressIndex] >=
            c[(k - 1) * cf::flow::kActionDim + cf::flow::kProgressIndex]);
  }
  CHECK(CodeOf([&] { app::ChunkAt(t, t.size(), h); }) == cf::ErrorCode::kDomain);
}

TEST_CASE("generate train resume") {
  const fs::path root = Scratch("pipeline");
  auto config = Tiny();
  const std::string data = (root / "data").string();
  app::CmdGenerate(config, data);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(data)) files += e.path().extension() == ".cft";
  CHECK(files == config.demos);
  CHECK(fs::exists(fs::path(data) / "manifest.txt"));

  const std::string again = (root / "again").string();
  app::CmdGenerate(config, again);
  CHECK(cf::data::ReadFileBytes(data + "/traj_00000.cft") ==
        cf::data::ReadFileBytes(again + "/traj_00000.cft"));

  auto zero = config;
  zero.demos = 0;
  CHECK(CodeOf([&] { app::CmdGenerate(zero, (root / "none").string()); }) ==
        cf::ErrorCode::kUsage);

  const std::string run = (root / "run").string();
  app::CmdTrain(config, {data, run, ""});
  const auto rows = Lines(cf::data::ReadFileBytes(run + "/loss.csv"));
  REQUIRE(rows.size() == config.steps + 1);
  auto loss_at = [](const std::string& row) {
    return std::stod(row.substr(row.find(',') + 1));
  };
  CHECK(std::isfinite(loss_at(rows.back())));

  const std::string run2 = (root / "run2").string();
  app::CmdTrain(config, {data, run2, ""});
  CHECK(cf::data::ReadFileBytes(run + "/model.ckpt") ==
        cf::data::ReadFileBytes(run2 + "/model.ckpt"));

  auto more = config;
  more.steps = 60;
  const std::string resumed = (root / "resumed").string();
  app::CmdTrain(more, {data, resumed, run + "/model.ckpt"});
  CHECK(app::LoadCheckpoint(resumed + "/model.ckpt").step == 60);

  auto other = config;
  other.width = 16;
  CHECK(CodeOf([&] { app::CmdTrain(other, {data, (root / "bad").string(), run + "/model.ckpt"}); }) ==
        cf::ErrorCode::kIncompatible);
  CHECK(CodeOf([&] { app::CmdTrain(config, {(root / "missing").string(), run, ""}); }) ==
        cf::ErrorCode::kMissingData);

  const std::string csv = app::CmdRollout(
      config, {app::PolicyKind::kLearned, app::Execution::kHybrid, run + "/model_ema.ckpt", ""});
  CHECK(csv.find("success rate") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("baseline rollouts") {
  app::RunConfig config;
  config.episodes = 20;
  const auto options = app::OptionsFromConfig(config);
  const auto scripted =
      app::RunEpisodes(config, app::PolicyKind::kScripted, nullptr, nullptr, options);
  REQUIRE(scripted.size() == 20);
  CHECK(app::Summarize(scripted).success_rate == 1.0);
  CHECK(app::Summarize(scripted).overloads == 0);
  const auto rows = Lines(app::FormatRolloutCsv(scripted));
  CHECK(rows.size() == 22);
  CHECK(rows.back().rfind("summary", 0) == 0);

  const auto zero = app::RunEpisodes(config, app::PolicyKind::kZero, nullptr, nullptr, options);
  CHECK(app::Summarize(zero).success_rate == 0.0);
  CHECK(app::Summarize(zero).overloads == 0);

  const auto again =
      app::RunEpisodes(config, app::PolicyKind::kScripted, nullptr, nullptr, options);
  CHECK(app::FormatRolloutCsv(again) == app::FormatRolloutCsv(scripted));
  CHECK(app::EvaluationSeed(42, 0) != app::EvaluationSeed(42, 1));
}

TEST_CASE("ablation suites") {
  const app::RunConfig base;
  CHECK(app::AblationSuite("components", base).size() == 4);
  CHECK(app::AblationSuite("moe_modality", base).size() == 3);
  CHECK(app::AblationSuite("injection", base).size() == 3);
  const auto comps = app::AblationSuite("components", base);
  CHECK_FALSE(comps.front().config.force_prompt);
  CHECK(comps.back().config.use_moe);
  CHECK(CodeOf([&] { app::AblationSuite("everything", base); }) == cf::ErrorCode::kUsage);
}

TEST_CASE("training lowers the loss") {
  const fs::path root = Scratch("descent");
  auto config = Tiny();
  config.steps = 400;
  config.lr = 3e-3;
  config.flow_hidden = 64;
  const std::string data = (root / "data").string();
  app::CmdGenerate(config, data);
  app::CmdTrain(config, {data, (root / "run").string(), ""});
  const auto rows = Lines(cf::data::ReadFileBytes((root / "run" / "loss.csv").string()));
  REQUIRE(rows.size() == config.steps + 1);
  auto loss_at = [&](std::size_t i) { return std::stod(rows[i].substr(rows[i].find(',') + 1)); };
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    early += loss_at(1 + i);
    late += loss_at(rows.size() - 1 - i);
  }
  CHECK(late < 0.8 * early);
}

TEST_CASE("checkpoint format") {
  CHECK(app::CheckCheckpointRoundTrip(3).passed);
  CHECK(CodeOf([] { app::DeserializeCheckpoint("contactflow-checkpoint 99\n\n"); }) ==
        cf::ErrorCode::kVersionMismatch);
  CHECK(CodeOf([] { app::LoadCheckpoint("/nonexistent/model.ckpt"); }) ==
        cf::ErrorCode::kMissingData);
}
