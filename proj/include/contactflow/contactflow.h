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

#ifndef CONTACTFLOW_CONTACTFLOW_H_
#define CONTACTFLOW_CONTACTFLOW_H_

#include <stddef.h>

#if defined(CF_BUILDING_LIBRARY)
#define CF_API __attribute__((visibility("default")))
#else
#define CF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_DIMENSION = 1,
  CF_ERR_DOMAIN = 2,
  CF_ERR_NUMERIC = 3,
  CF_ERR_CAPABILITY = 4,
  CF_ERR_IO = 5,
  CF_ERR_VERSION_MISMATCH = 6,
  CF_ERR_TRUNCATED = 7,
  CF_ERR_CHECKSUM = 8,
  CF_ERR_GAP = 9,
  CF_ERR_ANNOTATION = 10,
  CF_ERR_USAGE = 11,
  CF_ERR_MISSING_DATA = 12,
  CF_ERR_INCOMPATIBLE = 13,
  CF_ERR_INTERNAL = 14
} cf_status;

/* Process exit codes used by the command-line tool. */
enum {
  CF_EXIT_OK = 0,
  CF_EXIT_VERIFY_FAILED = 1,
  CF_EXIT_USAGE = 2,
  CF_EXIT_MISSING_DATA = 3,
  CF_EXIT_NUMERIC = 4,
  CF_EXIT_INCOMPATIBLE = 5
};

typedef struct cf_context cf_context;

/* Receives progress lines (training loss, per-check results). */
typedef void (*cf_log_fn)(void* user, const char* line);

CF_API const char* cf_version(void);
CF_API const char* cf_status_name(cf_status status);
CF_API int cf_exit_code(cf_status status);

/* A context owns a run configuration (defaults, seed 42) and the text of the
 * last command's output and error. Not safe for concurrent use. */
CF_API cf_status cf_context_create(cf_context** out);
CF_API void cf_context_destroy(cf_context* ctx);
CF_API const char* cf_last_error(const cf_context* ctx);
CF_API const char* cf_last_output(const cf_context* ctx);
CF_API void cf_set_log_callback(cf_context* ctx, cf_log_fn fn, void* user);

/* Configuration: `key = value` files, single overrides, FOCA_SEED and the
 * full-scale training schedule. */
CF_API cf_status cf_config_load(cf_context* ctx, const char* path);
CF_API cf_status cf_config_set(cf_context* ctx, const char* key, const char* value);
CF_API cf_status cf_config_apply_environment(cf_context* ctx);
CF_API cf_status cf_config_apply_full_scale(cf_context* ctx);
/* Current configuration as text; owned by the context. */
CF_API const char* cf_config_text(cf_context* ctx);

/* Commands. Output text is available from cf_last_output afterwards. */
CF_API cf_status cf_generate(cf_context* ctx, const char* out_dir);
CF_API cf_status cf_train(cf_context* ctx, const char* data_dir, const char* out_dir,
                          const char* resume_checkpoint /* nullable */);
/* policy: "learned", "scripted" or "zero"; execution: "hybrid" or "position". */
CF_API cf_status cf_rollout(cf_context* ctx, const char* policy, const char* execution,
                            const char* checkpoint /* nullable */, const char* out_csv);
/* suite: "components", "moe_modality" or "injection". */
CF_API cf_status cf_ablate(cf_context* ctx, const char* suite, const char* data_dir,
                           const char* out_csv);
CF_API cf_status cf_analyze(cf_context* ctx, size_t samples, const char* out_csv);
CF_API cf_status cf_segment(cf_context* ctx, const char* const* paths, size_t count,
                            size_t window, const char* out_csv);
CF_API cf_status cf_stats(cf_context* ctx, const char* const* paths, size_t count,
                          const char* out_csv);
/* Runs the named checks (all when count is 0). `all_passed` receives 1 or 0.
 * `fault_transition` deliberately corrupts the closed-form probability. */
CF_API cf_status cf_verify(cf_context* ctx, const char* const* only, size_t count,
                           int fault_transition, int* all_passed);

/* Closed-form subtask completion probability for one observation. */
CF_API cf_status cf_transition_probability(double alpha, double rate, double force_lower,
                                           double force_upper, double alignment, double distance,
                                           double force, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CONTACTFLOW_CONTACTFLOW_H_ */
