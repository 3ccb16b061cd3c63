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


#include <filesystem>
#include <string>
#include <vector>

#include "contactflow/contactflow.h"
#include "doctest.h"

extern "C" int cf_c_header_probe(void);

namespace {

struct Ctx {
  cf_context* p = nullptr;
  Ctx() { REQUIRE(cf_context_create(&p) == CF_OK); }
  ~Ctx() { cf_context_destroy(p); }
};

void Collect(void* user, const char* line) {
  static_cast<std::vector<std::string>*>(user)->push_back(line);
}

}  // namespace

TEST_CASE("c header compiles as c") { CHECK(cf_c_header_probe() == CF_EXIT_USAGE); }

TEST_CASE("status names and exit codes") {
  CHECK(std::string(cf_version()).size() > 0);
  CHECK(std::string(cf_status_name(CF_ERR_CHECKSUM)) == "checksum failure");
  CHECK(cf_exit_code(CF_OK) == CF_EXIT_OK);
  CHECK(cf_exit_code(CF_ERR_USAGE) == CF_EXIT_USAGE);
  CHECK(cf_exit_code(CF_ERR_MISSING_DATA) == CF_EXIT_MISSING_DATA);
  CHECK(cf_exit_code(CF_ERR_NUMERIC) == CF_EXIT_NUMERIC);
  CHECK(cf_exit_code(CF_ERR_INCOMPATIBLE) == CF_EXIT_INCOMPATIBLE);
}

TEST_CASE("configuration through the c api") {
  Ctx ctx;
  CHECK(cf_config_set(ctx.p, "chunk", "7") == CF_OK);
  CHECK(std::string(cf_config_text(ctx.p)).find("chunk = 7") != std::string::npos);
  CHECK(cf_config_set(ctx.p, "nonsense", "1") == CF_ERR_USAGE);
  CHECK(std::string(cf_last_error(ctx.p)).find("nonsense") != std::string::npos);
  CHECK(cf_config_load(ctx.p, "/nonexistent/run.cfg") == CF_ERR_MISSING_DATA);
  CHECK(cf_config_set(nullptr, "chunk", "7") == CF_ERR_USAGE);
}

TEST_CASE("closed-form probability through the c api") {
  double s = -1.0;
  CHECK(cf_transition_probability(2, 2, 0, 100, 0.5, 0.1, 20, &s) == CF_OK);
  CHECK(s == doctest::Approx(0.040937).epsilon(1e-5));
  CHECK(cf_transition_probability(2, 2, 50, 10, 0.5, 0.1, 20, &s) == CF_ERR_DOMAIN);
  CHECK(cf_transition_probability(2, 2, 0, 100, 0.5, 0.1, 20, nullptr) == CF_ERR_USAGE);
}

TEST_CASE("commands through the c api") {
  Ctx ctx;
  std::vector<std::string> lines;
  cf_set_log_callback(ctx.p, Collect, &lines);
  const char* only[] = {"gamma_identity", "flow_sampler"};
  int passed = 0;
  CHECK(cf_verify(ctx.p, only, 2, 0, &passed) == CF_OK);
  CHECK(passed == 1);
  CHECK(lines.size() == 2);
  CHECK(cf_verify(nullptr, only, 2, 0, &passed) == CF_ERR_USAGE);
  const char* unknown[] = {"nothing"};
  CHECK(cf_verify(ctx.p, unknown, 1, 0, &passed) == CF_ERR_USAGE);

  const auto dir = std::filesystem::temp_directory_path() / "cf_unit_capi";
  std::filesystem::remove_all(dir);
  CHECK(cf_config_set(ctx.p, "demos", "0") == CF_OK);
  CHECK(cf_generate(ctx.p, dir.string().c_str()) == CF_ERR_USAGE);
  CHECK(cf_config_set(ctx.p, "demos", "2") == CF_OK);
  CHECK(cf_generate(ctx.p, dir.string().c_str()) == CF_OK);
  CHECK(std::string(cf_last_output(ctx.p)).size() > 0);
  CHECK(cf_train(ctx.p, (dir / "missing").string().c_str(), (dir / "run").string().c_str(),
                 nullptr) == CF_ERR_MISSING_DATA);
  CHECK(cf_config_set(ctx.p, "episodes", "2") == CF_OK);
  CHECK(cf_rollout(ctx.p, "scripted", "hybrid", nullptr, "") == CF_OK);
  CHECK(cf_rollout(ctx.p, "oracle", "hybrid", nullptr, "") == CF_ERR_USAGE);
  std::filesystem::remove_all(dir);
}
