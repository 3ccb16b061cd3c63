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

#include "contactflow/contactflow.h"

#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/verify.hpp"
#include "error.hpp"
#include "transition/transition_model.hpp"

struct cf_context {
  cf::app::RunConfig config;
  std::string error;
  std::string output;
  std::string config_text;
  cf_log_fn log = nullptr;
  void* log_user = nullptr;
};

namespace {

cf_status StatusFor(cf::ErrorCode code) {
  return static_cast<cf_status>(static_cast<int>(code) + 1);
}

void Emit(cf_context* ctx, const std::string& text) {
  ctx->output = text;
  if (!ctx->log) return;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) ctx->log(ctx->log_user, line.c_str());
}

template <typename F>
cf_status Guard(cf_context* ctx, F&& body) {
  if (!ctx) return CF_ERR_USAGE;
  ctx->error.clear();
  try {
    body();
    return CF_OK;
  } catch (const cf::Error& e) {
    ctx->error = e.what();
    return StatusFor(e.code());
  } catch (const std::bad_alloc&) {
    ctx->error = "out of memory";
  } catch (const std::exception& e) {
    ctx->error = e.what();
  }
  return CF_ERR_INTERNAL;
}

std::string Str(const char* s) { return s ? s : ""; }

std::vector<std::string> Strings(const char* const* items, size_t count) {
  cf::Require(items != nullptr || count == 0, cf::ErrorCode::kUsage, "null list");
  std::vector<std::string> out;
  for (size_t i = 0; i < count; ++i) {
    cf::Require(items[i] != nullptr, cf::ErrorCode::kUsage, "null entry in list");
    out.emplace_back(items[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_name(cf_status status) {
  if (status == CF_OK) return "ok";
  if (status == CF_ERR_INTERNAL) return "internal error";
  if (status > CF_OK && status < CF_ERR_INTERNAL)
    return cf::ErrorCodeName(static_cast<cf::ErrorCode>(static_cast<int>(status) - 1));
  return "unknown status";
}

int cf_exit_code(cf_status status) {
  if (status == CF_OK) return CF_EXIT_OK;
  if (status == CF_ERR_INTERNAL) return CF_EXIT_NUMERIC;
  if (status > CF_OK && status < CF_ERR_INTERNAL)
    return cf::app::ExitCodeFor(static_cast<cf::ErrorCode>(static_cast<int>(status) - 1));
  return CF_EXIT_USAGE;
}

cf_status cf_context_create(cf_context** out) {
  if (!out) return CF_ERR_USAGE;
  *out = nullptr;
  try {
    *out = new cf_context();
  } catch (...) {
    return CF_ERR_INTERNAL;
  }
  return CF_OK;
}

void cf_context_destroy(cf_context* ctx) { delete ctx; }

const char* cf_last_error(const cf_context* ctx) { return ctx ? ctx->error.c_str() : ""; }

const char* cf_last_output(const cf_context* ctx) { return ctx ? ctx->output.c_str() : ""; }

void cf_set_log_callback(cf_context* ctx, cf_log_fn fn, void* user) {
  if (!ctx) return;
  ctx->log = fn;
  ctx->log_user = user;
}

cf_status cf_config_load(cf_context* ctx, const char* path) {
  return Guard(ctx, [&] {
    cf::Require(path != nullptr, cf::ErrorCode::kUsage, "config path is null");
    ctx->config = cf::app::LoadConfig(path, ctx->config);
  });
}

cf_status cf_config_set(cf_context* ctx, const char* key, const char* value) {
  return Guard(ctx, [&] {
    cf::Require(key && value, cf::ErrorCode::kUsage, "config key or value is null");
    cf::app::SetConfigValue(ctx->config, key, value);
  });
}

cf_status cf_config_apply_environment(cf_context* ctx) {
  return Guard(ctx, [&] { cf::app::ApplyEnvironmentOverrides(ctx->config); });
}

cf_status cf_config_apply_full_scale(cf_context* ctx) {
  return Guard(ctx, [&] { cf::app::ApplyFullScale(ctx->config); });
}

const char* cf_config_text(cf_context* ctx) {
  if (!ctx) return "";
  ctx->config_text = cf::app::FormatConfig(ctx->config);
  return ctx->config_text.c_str();
}

cf_status cf_generate(cf_context* ctx, const char* out_dir) {
  return Guard(ctx, [&] {
    cf::Require(out_dir != nullptr, cf::ErrorCode::kUsage, "output directory is null");
    Emit(ctx, cf::app::CmdGenerate(ctx->config, out_dir));
  });
}

cf_status cf_train(cf_context* ctx, const char* data_dir, const char* out_dir,
                   const char* resume_checkpoint) {
  return Guard(ctx, [&] {
    cf::Require(data_dir && out_dir, cf::ErrorCode::kUsage, "data or output directory is null");
    Emit(ctx, cf::app::CmdTrain(ctx->config, {data_dir, out_dir, Str(resume_checkpoint)}));
  });
}

cf_status cf_rollout(cf_context* ctx, const char* policy, const char* execution,
                     const char* checkpoint, const char* out_csv) {
  return Guard(ctx, [&] {
    cf::app::RolloutRequest req;
    req.policy = cf::app::ParsePolicyKind(policy ? policy : "learned");
    req.execution = cf::app::ParseExecution(execution ? execution : "hybrid");
    req.checkpoint = Str(checkpoint);
    req.out_csv = Str(out_csv);
    Emit(ctx, cf::app::CmdRollout(ctx->config, req));
  });
}

cf_status cf_ablate(cf_context* ctx, const char* suite, const char* data_dir,
                    const char* out_csv) {
  return Guard(ctx, [&] {
    cf::Require(suite && data_dir, cf::ErrorCode::kUsage, "suite or data directory is null");
    Emit(ctx, cf::app::CmdAblate(ctx->config, suite, data_dir, Str(out_csv)));
  });
}

cf_status cf_analyze(cf_context* ctx, size_t samples, const char* out_csv) {
  return Guard(ctx, [&] {
    cf::app::AnalyzeRequest req;
    if (samples > 0) req.samples = samples;
    req.out_csv = Str(out_csv);
    Emit(ctx, cf::app::CmdAnalyze(ctx->config, req));
  });
}

cf_status cf_segment(cf_context* ctx, const char* const* paths, size_t count, size_t window,
                     const char* out_csv) {
  return Guard(ctx, [&] {
    Emit(ctx, cf::app::CmdSegment(Strings(paths, count), window, Str(out_csv)));
  });
}

cf_status cf_stats(cf_context* ctx, const char* const* paths, size_t count,
                   const char* out_csv) {
  return Guard(ctx, [&] { Emit(ctx, cf::app::CmdStats(Strings(paths, count), Str(out_csv))); });
}

cf_status cf_verify(cf_context* ctx, const char* const* only, size_t count, int fault_transition,
                    int* all_passed) {
  return Guard(ctx, [&] {
    cf::app::VerifyOptions options;
    options.only = Strings(only, count);
    options.fault.transition_constant = fault_transition != 0;
    options.seed = ctx->config.seed;
    const auto results = cf::app::RunVerify(options);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    if (all_passed) *all_passed = ok ? 1 : 0;
    Emit(ctx, cf::app::FormatVerifyReport(results));
  });
}

cf_status cf_transition_probability(double alpha, double rate, double force_lower,
                                    double force_upper, double alignment, double distance,
                                    double force, double* out) {
  if (!out) return CF_ERR_USAGE;
  try {
    cf::transition::TransitionObservation obs;
    obs.params.alpha = alpha;
    obs.params.rate = rate;
    obs.params.force = {force_lower, force_upper};
    obs.alignment = alignment;
    obs.distance = distance;
    obs.force = force;
    *out = cf::transition::TransitionProbability(obs);
    return CF_OK;
  } catch (const cf::Error& e) {
    return StatusFor(e.code());
  } catch (...) {
    return CF_ERR_INTERNAL;
  }
}

}  // extern "C"
