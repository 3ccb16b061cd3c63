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

#include "app/config.hpp"

#include <charconv>
#include <map>
#include <type_traits>
#include <cstdlib>
#include <sstream>

#include "data/trajectory_io.hpp"
#include "error.hpp"

namespace cf::app {

std::vector<ConfigField> ConfigFields(RunConfig& c) {
  return {
      {"seed", SeedRef{&c.seed}},
      {"task", &c.task},
      {"demos", &c.demos},
      {"data_dir", &c.data_dir},
      {"batch", &c.batch},
      {"steps", &c.steps},
      {"lr", &c.lr},
      {"weight_decay", &c.weight_decay},
      {"ema", &c.ema},
      {"log_every", &c.log_every},
      {"width", &c.width},
      {"heads", &c.heads},
      {"blocks", &c.blocks},
      {"chunk", &c.chunk},
      {"flow_hidden", &c.flow_hidden},
      {"flow_layers", &c.flow_layers},
      {"time_features", &c.time_features},
      {"euler_steps", &c.euler_steps},
      {"moe_mode", &c.moe_mode},
      {"injection", &c.injection},
      {"moe_visual", &c.moe_visual},
      {"moe_force", &c.moe_force},
      {"force_prompt", &c.force_prompt},
      {"multimodal_encoder", &c.multimodal_encoder},
      {"use_moe", &c.use_moe},
      {"condition_on_progress", &c.condition_on_progress},
      {"causal", &c.causal},
      {"alpha", &c.alpha},
      {"rate", &c.rate},
      {"force_lower", &c.force_lower},
      {"force_upper", &c.force_upper},
      {"threshold", &c.threshold},
      {"stiffness", &c.stiffness},
      {"damping", &c.damping},
      {"friction", &c.friction},
      {"force_limit", &c.force_limit},
      {"admittance", &c.admittance},
      {"max_steps", &c.max_steps},
      {"episodes", &c.episodes},
      {"perturb", &c.perturb},
      {"jobs", &c.jobs},
  };
}

namespace {

template <typename T>
T ParseInteger(std::string_view key, std::string_view value) {
  T v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  Require(ec == std::errc{} && ptr == value.data() + value.size(), ErrorCode::kUsage,
          "config '" + std::string(key) + "' expects a non-negative integer, got '" +
              std::string(value) + "'");
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  Fail(ErrorCode::kUsage, "config '" + std::string(key) + "' expects on/off, got '" +
                              std::string(value) + "'");
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void SetConfigValue(RunConfig& config, std::string_view key, std::string_view value) {
  for (ConfigField& f : ConfigFields(config)) {
    if (f.key != key) continue;
    std::visit(
        [&](auto p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<decltype(p), SeedRef>) {
            *p.value = ParseInteger<std::uint64_t>(key, value);
          } else if constexpr (std::is_same_v<T, std::string>) {
            *p = std::string(value);
          } else if constexpr (std::is_same_v<T, bool>) {
            *p = ParseBool(key, value);
          } else if constexpr (std::is_same_v<T, double>) {
            try {
              *p = data::ParseDouble(value);
            } catch (const Error&) {
              Fail(ErrorCode::kUsage, "config '" + std::string(key) + "' expects a number, got '" +
                                          std::string(value) + "'");
            }
          } else {
            *p = ParseInteger<T>(key, value);
          }
        },
        f.ref);
    return;
  }
  Fail(ErrorCode::kUsage, "unknown config key '" + std::string(key) + "'");
}

void RunConfig::Validate() const {
  Require(batch > 0 && chunk > 0 && width > 0 && heads > 0 && width % heads == 0,
          ErrorCode::kUsage, "batch, chunk, width and heads must be positive (width divisible by heads)");
  Require(euler_steps > 0 && flow_hidden > 0 && jobs > 0 && max_steps > 0, ErrorCode::kUsage,
          "step and size counts must be positive");
  Require(lr > 0.0 && weight_decay >= 0.0 && ema >= 0.0 && ema < 1.0, ErrorCode::kUsage,
          "learning rate, weight decay or EMA decay out of range");
  Require(alpha > 0.0 && rate > 0.0 && force_lower < force_upper, ErrorCode::kUsage,
          "transition parameters need alpha > 0, lambda > 0, n < m");
  Require(threshold > 0.0 && threshold <= 1.0, ErrorCode::kUsage, "threshold must lie in (0, 1]");
  Require(stiffness > 0.0 && damping >= 0.0 && friction >= 0.0 && force_limit > 0.0 &&
              admittance >= 0.0,
          ErrorCode::kUsage, "environment parameters out of range");
  Require(moe_mode == "soft" || moe_mode == "top1", ErrorCode::kUsage,
          "moe_mode must be soft or top1");
  Require(injection == "vlm_pathway" || injection == "multimodal_encoder" ||
              injection == "state_fusion",
          ErrorCode::kUsage, "unknown injection variant '" + injection + "'");
  Require(task == "press" || task == "wipe" || task == "probe", ErrorCode::kUsage,
          "task must be press, wipe or probe");
}

RunConfig ParseConfig(std::string_view text, RunConfig base) {
  std::map<std::string, std::string> kv;
  try {
    kv = data::ParseKeyValues(text);
  } catch (const Error& e) {
    Fail(ErrorCode::kUsage, e.what());
  }
  for (const auto& [key, value] : kv) SetConfigValue(base, key, value);
  return base;
}

RunConfig LoadConfig(const std::string& path, RunConfig base) {
  std::string text;
  try {
    text = data::ReadFileBytes(path);
  } catch (const Error&) {
    Fail(ErrorCode::kMissingData, "cannot read config file '" + path + "'");
  }
  return ParseConfig(text, std::move(base));
}

std::string FormatConfig(const RunConfig& config) {
  RunConfig copy = config;
  std::ostringstream out;
  for (const ConfigField& f : ConfigFields(copy)) {
    out << f.key << " = ";
    std::visit(
        [&](auto p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<decltype(p), SeedRef>) out << *p.value;
          else if constexpr (std::is_same_v<T, bool>) out << (*p ? "on" : "off");
          else if constexpr (std::is_same_v<T, double>) out << FormatDouble(*p);
          else out << *p;
        },
        f.ref);
    out << '\n';
  }
  return out.str();
}

void ApplyEnvironmentOverrides(RunConfig& config) {
  if (const char* seed = std::getenv("FOCA_SEED"); seed && *seed)
    config.seed = ParseInteger<std::uint64_t>("FOCA_SEED", seed);
}

void ApplyFullScale(RunConfig& config) {
  config.steps = 30000;
  config.batch = 32;
  config.seed = 42;
}

}  // namespace cf::app
