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

#include "app/commands.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "analysis/control_analysis.hpp"
#include "app/checkpoint.hpp"
#include "app/trainer.hpp"
#include "context/tokenizer.hpp"
#include "data/segmentation.hpp"
#include "data/stats.hpp"
#include "data/trajectory_io.hpp"
#include "error.hpp"
#include "sim/demonstrator.hpp"

namespace cf::app {

namespace fs = std::filesystem;

namespace {

template <typename... Args>
std::string Fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create directory " + dir + ": " + ec.message());
}

void WriteOptional(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
  data::WriteFileBytes(path, text);
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

constexpr const char* kManifestName = "manifest.txt";

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
    case ErrorCode::kDomain:
      return kExitUsage;
    case ErrorCode::kMissingData:
    case ErrorCode::kIo:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kTruncated:
    case ErrorCode::kChecksum:
    case ErrorCode::kGap:
    case ErrorCode::kAnnotation:
      return kExitMissingData;
    case ErrorCode::kNumeric:
      return kExitNumeric;
    case ErrorCode::kDimension:
    case ErrorCode::kIncompatible:
    case ErrorCode::kCapability:
      return kExitIncompatible;
  }
  return kExitUsage;
}

std::string CmdGenerate(const RunConfig& config, const std::string& out_dir) {
  Require(config.demos > 0, ErrorCode::kUsage, "generate needs a positive count");
  const sim::TaskKind task = sim::ParseTask(config.task);
  config.Validate();
  EnsureDir(out_dir);
  const EpisodeOptions options = OptionsFromConfig(config);
  const sim::EnvParams env = EnvFromConfig(config);

  data::DatasetManifest manifest;
  manifest.task = config.task;
  manifest.seed = config.seed;
  manifest.count = config.demos;
  std::size_t ok = 0, steps = 0;
  for (std::size_t i = 0; i < config.demos; ++i) {
    const sim::TaskScene scene = sim::MakeScene(task, config.seed + i, env);
    sim::Demonstration demo = sim::RunDemonstration(scene, options.episode);
    demo.trajectory.skills = data::SegmentSkills(demo.trajectory);
    const std::string name = Fmt("traj_%05zu.cft", i);
    data::WriteTrajectory(demo.trajectory, JoinPath(out_dir, name));
    manifest.files.push_back(name);
    ok += demo.metrics.success ? 1 : 0;
    steps += demo.trajectory.size();
  }
  data::WriteFileBytes(JoinPath(out_dir, manifest.corpus),
                       context::FormatPromptCorpus(sim::DefaultPromptCorpus()));
  data::WriteFileBytes(JoinPath(out_dir, kManifestName), data::FormatDatasetManifest(manifest));
  return Fmt("generated %zu %s trajectories in %s (%zu steps, %zu successful)\n", config.demos,
             config.task.c_str(), out_dir.c_str(), steps, ok);
}

std::vector<data::Trajectory> LoadDataset(const std::string& data_dir,
                                          std::vector<context::PromptBlock>* corpus) {
  const std::string manifest_path = JoinPath(data_dir, kManifestName);
  Require(fs::exists(manifest_path), ErrorCode::kMissingData,
          "no dataset manifest at " + manifest_path);
  const data::DatasetManifest manifest =
      data::ParseDatasetManifest(data::ReadFileBytes(manifest_path));
  std::vector<data::Trajectory> out;
  for (const auto& f : manifest.files) {
    const std::string path = JoinPath(data_dir, f);
    Require(fs::exists(path), ErrorCode::kMissingData, "missing trajectory file " + path);
    out.push_back(data::ReadTrajectory(path));
  }
  Require(!out.empty(), ErrorCode::kMissingData, "dataset " + data_dir + " is empty");
  if (corpus) {
    const std::string corpus_path = JoinPath(data_dir, manifest.corpus);
    Require(fs::exists(corpus_path), ErrorCode::kMissingData,
            "missing prompt corpus " + corpus_path);
    *corpus = context::ReadPromptCorpus(corpus_path);
  }
  return out;
}

std::string CmdTrain(const RunConfig& config, const TrainPaths& paths) {
  config.Validate();
  std::vector<context::PromptBlock> corpus;
  const auto trajectories = LoadDataset(paths.data_dir, &corpus);
  const TrainingSet set = BuildTrainingSet(trajectories, corpus, config.chunk,
                                           OptionsFromConfig(config).episode.transition);
  std::optional<Checkpoint> resume;
  if (!paths.resume.empty()) resume = LoadCheckpoint(paths.resume);

  std::ostringstream csv;
  csv << "step,loss,lr\n";
  const std::size_t every = std::max<std::size_t>(1, config.log_every);
  const TrainOutcome outcome =
      Train(config, set, resume, [&](std::uint64_t step, double loss, double lr) {
        if (step % every == 0 || step + 1 == config.steps)
          csv << step << ',' << Fmt("%.17g", loss) << ',' << Fmt("%.17g", lr) << '\n';
      });
  EnsureDir(paths.out_dir);
  data::WriteFileBytes(JoinPath(paths.out_dir, "loss.csv"), csv.str());
  SaveCheckpoint(outcome.model, JoinPath(paths.out_dir, "model.ckpt"));
  SaveCheckpoint(outcome.ema, JoinPath(paths.out_dir, "model_ema.ckpt"));
  std::string text = Fmt("trained %zu steps on %zu examples", outcome.losses.size(),
                         set.examples.size());
  if (!outcome.losses.empty())
    text += Fmt(" (loss %.6f -> %.6f)", outcome.losses.front(), outcome.losses.back());
  return text + "; checkpoints in " + paths.out_dir + "\n";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  if (name == "learned") return PolicyKind::kLearned;
  if (name == "scripted") return PolicyKind::kScripted;
  if (name == "zero") return PolicyKind::kZero;
  Fail(ErrorCode::kUsage, "unknown policy '" + std::string(name) + "' (learned, scripted, zero)");
}

Execution ParseExecution(std::string_view name) {
  if (name == "hybrid") return Execution::kHybrid;
  if (name == "position") return Execution::kPositionOnly;
  Fail(ErrorCode::kUsage, "unknown execution mode '" + std::string(name) + "' (hybrid, position)");
}

std::string CmdRollout(const RunConfig& config, const RolloutRequest& request) {
  config.Validate();
  const EpisodeOptions options = [&] {
    EpisodeOptions o = OptionsFromConfig(config);
    o.execution = request.execution;
    return o;
  }();
  std::vector<EpisodeResult> results;
  if (request.policy == PolicyKind::kLearned) {
    Require(!request.checkpoint.empty(), ErrorCode::kUsage, "rollout needs --checkpoint");
    Checkpoint ckpt = LoadCheckpoint(request.checkpoint);
    Require(ckpt.config.task == config.task || config.task.empty(), ErrorCode::kIncompatible,
            "checkpoint was trained on '" + ckpt.config.task + "', not '" + config.task + "'");
    const LoadedPolicy policy = RestorePolicy(std::move(ckpt));
    results = RunEpisodes(config, request.policy, &policy, &policy.checkpoint.params, options);
  } else {
    results = RunEpisodes(config, request.policy, nullptr, nullptr, options);
  }
  const std::string csv = FormatRolloutCsv(results);
  WriteOptional(request.out_csv, csv);
  const RolloutSummary s = Summarize(results);
  return csv + Fmt("success rate %.3f over %zu episodes, %zu overload steps\n", s.success_rate,
                   results.size(), s.overloads);
}

std::vector<AblationVariant> AblationSuite(std::string_view suite, const RunConfig& base) {
  std::vector<AblationVariant> out;
  if (suite == "components") {
    RunConfig c = base;
    c.force_prompt = false;
    c.multimodal_encoder = false;
    c.use_moe = false;
    out.push_back({"baseline", c});
    c.force_prompt = true;
    out.push_back({"+FP", c});
    c.multimodal_encoder = true;
    out.push_back({"+FP+ME", c});
    c.use_moe = true;
    out.push_back({"full", c});
  } else if (suite == "moe_modality") {
    RunConfig c = base;
    c.moe_visual = false;
    c.moe_force = true;
    out.push_back({"w/o VM", c});
    c.moe_visual = true;
    c.moe_force = false;
    out.push_back({"w/o FM", c});
    c.moe_force = true;
    out.push_back({"VM+FM", c});
  } else if (suite == "injection") {
    for (const char* v : {"vlm_pathway", "multimodal_encoder", "state_fusion"}) {
      RunConfig c = base;
      c.injection = v;
      out.push_back({v, c});
    }
  } else {
    Fail(ErrorCode::kUsage, "unknown ablation suite '" + std::string(suite) +
                                "' (components, moe_modality, injection)");
  }
  return out;
}

std::string CmdAblate(const RunConfig& config, std::string_view suite,
                      const std::string& data_dir, const std::string& out_csv) {
  const std::vector<AblationVariant> variants = AblationSuite(suite, config);
  config.Validate();
  std::vector<context::PromptBlock> corpus;
  const auto trajectories = LoadDataset(data_dir, &corpus);
  const TrainingSet set = BuildTrainingSet(trajectories, corpus, config.chunk,
                                           OptionsFromConfig(config).episode.transition);

  struct Row {
    double loss = 0.0;
    RolloutSummary summary;
    std::string error;
    ErrorCode code = ErrorCode::kNumeric;
  };
  std::vector<Row> rows(variants.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < variants.size(); i = next++) {
      try {
        RunConfig c = variants[i].config;
        c.jobs = 1;
        const TrainOutcome outcome = Train(c, set);
        rows[i].loss = outcome.losses.empty() ? 0.0 : outcome.losses.back();
        const LoadedPolicy policy = RestorePolicy(outcome.ema);
        rows[i].summary = Summarize(RunEpisodes(c, PolicyKind::kLearned, &policy,
                                                &policy.checkpoint.params, OptionsFromConfig(c)));
      } catch (const Error& e) {
        rows[i].error = e.what();
        rows[i].code = e.code();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, variants.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!rows[i].error.empty()) Fail(rows[i].code, variants[i].name + ": " + rows[i].error);

  std::ostringstream csv;
  csv << "suite,variant,force_prompt,multimodal_encoder,moe,moe_visual,moe_force,injection,"
         "final_loss,success_rate,overload_rate,force_rms\n";
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const RunConfig& c = variants[i].config;
    const Row& r = rows[i];
    csv << suite << ',' << variants[i].name << ',' << c.force_prompt << ','
        << c.multimodal_encoder << ',' << c.use_moe << ',' << c.moe_visual << ',' << c.moe_force
        << ',' << c.injection << ',' << Fmt("%.6f", r.loss) << ','
        << Fmt("%.4f", r.summary.success_rate) << ','
        << Fmt("%.4f", r.summary.overload_episode_rate) << ','
        << Fmt("%.4f", r.summary.mean_force_rms) << '\n';
  }
  WriteOptional(out_csv, csv.str());
  return csv.str();
}

std::string CmdAnalyze(const RunConfig& config, const AnalyzeRequest& request) {
  using analysis::ControlMode;
  const sim::EnvParams env = EnvFromConfig(config);
  std::ostringstream csv, text;
  csv << "kind,mode,depth,authority,rank,kappa,reachable_dim,tail_ratio,sigma_min,sigma_max\n";
  for (const double depth : {0.002, 0.01, 0.02}) {
    const geom::Pose6 op{0.0, 0.0, env.surface_height - depth, 0.0, 0.0, 0.0};
    const nn::Matrix jac = analysis::LinearizeEnv(env, op);
    for (const ControlMode mode : {ControlMode::kPositionOnly, ControlMode::kHybrid}) {
      const auto report = analysis::Analyze(analysis::BuildSystem(jac, mode));
      const auto reach =
          analysis::ReachableDimEstimate(env, mode, op, request.samples, config.seed);
      const auto& sv = report.singular_values;
      csv << "operating_point," << analysis::ControlModeName(mode) << ',' << depth << ",1,"
          << report.rank << ',' << Fmt("%.6g", report.kappa) << ',' << reach.dimension << ','
          << Fmt("%.3e", reach.tail_ratio) << ',' << Fmt("%.6g", sv.empty() ? 0.0 : sv.back())
          << ',' << Fmt("%.6g", sv.empty() ? 0.0 : sv.front()) << '\n';
      text << Fmt("%-13s depth %.3f m: rank %zu, kappa %.3f, reachable dim %zu (tail %.1e)\n",
                  std::string(analysis::ControlModeName(mode)).c_str(), depth, report.rank,
                  report.kappa, reach.dimension, reach.tail_ratio);
    }
  }
  const geom::Pose6 op{0.0, 0.0, env.surface_height - 0.01, 0.0, 0.0, 0.0};
  const nn::Matrix jac = analysis::LinearizeEnv(env, op);
  for (const double authority : {0.0, 1e-3, 0.1, 1.0, 10.0}) {
    const auto report = analysis::Analyze(analysis::BuildSystem(jac, ControlMode::kHybrid, authority));
    const auto& sv = report.singular_values;
    csv << "authority_sweep,hybrid,0.01," << authority << ',' << report.rank << ','
        << Fmt("%.6g", report.kappa) << ",,," << Fmt("%.6g", sv.empty() ? 0.0 : sv.back()) << ','
        << Fmt("%.6g", sv.empty() ? 0.0 : sv.front()) << '\n';
    text << Fmt("hybrid authority %-6g: rank %zu, kappa %.3f\n", authority, report.rank,
                report.kappa);
  }
  WriteOptional(request.out_csv, csv.str());
  return text.str();
}

std::string CmdSegment(const std::vector<std::string>& paths, std::size_t window,
                       const std::string& out_csv) {
  Require(!paths.empty(), ErrorCode::kUsage, "segment needs at least one trajectory");
  Require(window > 0, ErrorCode::kUsage, "window must be positive");
  data::SegmentationRules rules;
  rules.window = window;
  std::ostringstream csv;
  csv << "file,window,start,end,label\n";
  std::array<std::size_t, data::kSkillCount> counts{};
  for (const auto& path : paths) {
    const data::Trajectory t = data::ReadTrajectory(path);
    const auto labels = data::SegmentSkills(t, rules);
    for (std::size_t w = 0; w < labels.size(); ++w) {
      const std::size_t start = w * window;
      const std::size_t end = std::min(t.size(), start + window);
      csv << path << ',' << w << ',' << start << ',' << end << ','
          << data::SkillName(labels[w]) << '\n';
      ++counts[static_cast<std::size_t>(labels[w])];
    }
  }
  WriteOptional(out_csv, csv.str());
  if (!out_csv.empty()) {
    std::string text = "windows per skill:";
    for (std::size_t s = 0; s < counts.size(); ++s)
      text += Fmt(" %s=%zu", std::string(data::SkillName(static_cast<data::SkillLabel>(s))).c_str(),
                  counts[s]);
    return text + "\n";
  }
  return csv.str();
}

std::string CmdStats(const std::vector<std::string>& paths, const std::string& out_csv) {
  Require(!paths.empty(), ErrorCode::kUsage, "stats needs at least one trajectory");
  const data::DatasetReport report = data::DatasetStats(paths);
  const std::string csv = data::FormatStatsCsv(report);
  WriteOptional(out_csv, csv);
  std::string text;
  for (const auto& [task, counts] : report.tasks)
    text += Fmt("%s: %zu trajectories, %zu steps\n", task.c_str(), counts.trajectories,
                counts.steps);
  for (const auto& [path, reason] : report.unreadable)
    text += "unreadable " + path + ": " + reason + "\n";
  return out_csv.empty() ? csv + text : text;
}

}  // namespace cf::app
