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

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "contactflow/contactflow.h"

namespace {

struct Context {
  cf_context* ctx = nullptr;
  Context() {
    if (cf_context_create(&ctx) != CF_OK) ctx = nullptr;
  }
  ~Context() { cf_context_destroy(ctx); }
};

void PrintLine(void*, const char* line) { std::printf("%s\n", line); }

int Report(cf_context* ctx, cf_status status) {
  if (status != CF_OK)
    std::fprintf(stderr, "contactflow: %s: %s\n", cf_status_name(status), cf_last_error(ctx));
  return cf_exit_code(status);
}

std::vector<const char*> CStrings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Context holder;
  cf_context* ctx = holder.ctx;
  if (!ctx) {
    std::fprintf(stderr, "contactflow: cannot allocate a context\n");
    return CF_EXIT_NUMERIC;
  }

  CLI::App app{"Force-aware flow-matching policies on a simulated contact bench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cf_version());

  std::string config_path;
  std::vector<std::string> sets;
  bool full_scale = false;
  std::string seed, jobs, moe_vm, moe_fm, moe_mode, injection;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", sets, "override one setting (key=value)");
  app.add_flag("--paper-config", full_scale, "full-scale training schedule (30000 steps, batch 32)");
  app.add_option("--seed", seed, "random seed (default 42; FOCA_SEED also applies)");
  app.add_option("--jobs", jobs, "concurrent rollout episodes / ablation variants");
  app.add_option("--moe-vm", moe_vm, "visual expert input to the mixture")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--moe-fm", moe_fm, "force expert input to the mixture")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--moe-mode", moe_mode, "soft or top1 routing")->check(CLI::IsMember({"soft", "top1"}));
  app.add_option("--injection", injection, "force injection point")
      ->check(CLI::IsMember({"vlm_pathway", "multimodal_encoder", "state_fusion"}));

  std::string task, count, out_dir = "data";
  auto* gen = app.add_subcommand("generate", "write scripted-expert trajectories");
  gen->add_option("--task", task, "press, wipe or probe");
  gen->add_option("--count", count, "number of trajectories");
  gen->add_option("--out", out_dir, "output directory");

  std::string data_dir = "data", train_out = "run", resume, steps, batch;
  auto* train = app.add_subcommand("train", "flow-matching training");
  train->add_option("--data", data_dir, "dataset directory");
  train->add_option("--out", train_out, "checkpoint directory");
  train->add_option("--resume", resume, "continue from a checkpoint");
  train->add_option("--steps", steps, "total optimizer steps");
  train->add_option("--batch", batch, "batch size");

  std::string policy = "learned", execution = "hybrid", checkpoint, episodes, rollout_out;
  bool perturb = false;
  auto* roll = app.add_subcommand("rollout", "evaluate a policy in simulation");
  roll->add_option("--checkpoint", checkpoint, "trained checkpoint");
  roll->add_option("--policy", policy, "learned, scripted or zero")
      ->check(CLI::IsMember({"learned", "scripted", "zero"}));
  roll->add_option("--execution", execution, "hybrid or position")
      ->check(CLI::IsMember({"hybrid", "position"}));
  roll->add_option("--episodes", episodes, "number of episodes");
  roll->add_option("--task", task, "press, wipe or probe");
  roll->add_flag("--perturb", perturb, "raise the surface once the tool nears it");
  roll->add_option("--out", rollout_out, "CSV output path");

  std::string suite, ablate_out;
  auto* ablate = app.add_subcommand("ablate", "train and evaluate ablation variants");
  ablate->add_option("suite", suite, "components, moe_modality or injection")->required();
  ablate->add_option("--data", data_dir, "dataset directory");
  ablate->add_option("--episodes", episodes, "episodes per variant");
  ablate->add_option("--steps", steps, "training steps per variant");
  ablate->add_option("--out", ablate_out, "CSV output path");

  std::size_t samples = 10000;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "controllability of position-only vs hybrid control");
  analyze->add_option("--samples", samples, "sampled commands for the reachable-set estimate");
  analyze->add_option("--out", analyze_out, "CSV output path");

  std::vector<std::string> files;
  std::size_t window = 30;
  std::string segment_out;
  auto* segment = app.add_subcommand("segment", "label fixed windows with skill primitives");
  segment->add_option("files", files, "trajectory files")->required();
  segment->add_option("--window", window, "window length in steps");
  segment->add_option("--out", segment_out, "CSV output path");

  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "dataset force histograms and skill counts");
  stats->add_option("files", files, "trajectory files")->required();
  stats->add_option("--out", stats_out, "CSV output path");

  std::vector<std::string> only;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "run the verification checks");
  verify->add_option("--only", only, "run only these checks");
  verify->add_option("--fault", fault, "inject a defect (transition_constant)")->check(CLI::IsMember({"transition_constant"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? CF_EXIT_OK : CF_EXIT_USAGE;
  }

  cf_set_log_callback(ctx, PrintLine, nullptr);
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "contactflow: --set expects key=value, got '%s'\n", s.c_str());
      return CF_EXIT_USAGE;
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto add = [&](const char* key, const std::string& value) {
    if (!value.empty()) overrides.emplace_back(key, value);
  };
  add("seed", seed);
  add("jobs", jobs);
  add("moe_visual", moe_vm);
  add("moe_force", moe_fm);
  add("moe_mode", moe_mode);
  add("injection", injection);
  add("task", task);
  add("demos", count);
  add("steps", steps);
  add("batch", batch);
  add("episodes", episodes);
  if (perturb) overrides.emplace_back("perturb", "on");

  cf_status st = CF_OK;
  if (!config_path.empty() && (st = cf_config_load(ctx, config_path.c_str())) != CF_OK)
    return Report(ctx, st);
  if (full_scale && (st = cf_config_apply_full_scale(ctx)) != CF_OK) return Report(ctx, st);
  if ((st = cf_config_apply_environment(ctx)) != CF_OK) return Report(ctx, st);
  for (const auto& [key, value] : overrides)
    if ((st = cf_config_set(ctx, key.c_str(), value.c_str())) != CF_OK) return Report(ctx, st);

  if (*gen) return Report(ctx, cf_generate(ctx, out_dir.c_str()));
  if (*train)
    return Report(ctx, cf_train(ctx, data_dir.c_str(), train_out.c_str(),
                                resume.empty() ? nullptr : resume.c_str()));
  if (*roll)
    return Report(ctx, cf_rollout(ctx, policy.c_str(), execution.c_str(),
                                  checkpoint.empty() ? nullptr : checkpoint.c_str(),
                                  rollout_out.c_str()));
  if (*ablate) return Report(ctx, cf_ablate(ctx, suite.c_str(), data_dir.c_str(), ablate_out.c_str()));
  if (*analyze) return Report(ctx, cf_analyze(ctx, samples, analyze_out.c_str()));
  if (*segment) {
    const auto paths = CStrings(files);
    return Report(ctx, cf_segment(ctx, paths.data(), paths.size(), window, segment_out.c_str()));
  }
  if (*stats) {
    const auto paths = CStrings(files);
    return Report(ctx, cf_stats(ctx, paths.data(), paths.size(), stats_out.c_str()));
  }
  if (*verify) {
    const auto names = CStrings(only);
    int passed = 0;
    st = cf_verify(ctx, names.data(), names.size(), fault == "transition_constant", &passed);
    if (st != CF_OK) return Report(ctx, st);
    return passed ? CF_EXIT_OK : CF_EXIT_VERIFY_FAILED;
  }
  return CF_EXIT_USAGE;
}
