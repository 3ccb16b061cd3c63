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

#include "app/checkpoint.hpp"

#include <bit>
#include <sstream>

#include "data/trajectory_io.hpp"
#include "error.hpp"

namespace cf::app {

namespace {

constexpr std::string_view kModelKeys[] = {
    "width", "heads", "blocks", "chunk", "flow_hidden", "flow_layers", "time_features",
    "injection", "moe_visual", "moe_force", "force_prompt", "multimodal_encoder", "use_moe",
    "condition_on_progress", "causal", "moe_mode"};

std::string JoinExact(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + data::FormatExact(v[i]);
  return out;
}

std::vector<double> SplitExact(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  for (std::string w; in >> w;) out.push_back(data::ParseDouble(w));
  return out;
}

void PutMatrix(std::string& out, const nn::Matrix& m) {
  for (double v : m.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
}

void GetMatrix(std::string_view payload, std::size_t& pos, nn::Matrix& m) {
  Require(payload.size() - pos >= 8 * m.size(), ErrorCode::kTruncated,
          "checkpoint payload ends early");
  for (double& v : m.values()) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[pos + i])) << (8 * i);
    v = std::bit_cast<double>(bits);
    pos += 8;
  }
}

const std::string& Get(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  Require(it != kv.end(), ErrorCode::kIncompatible, "checkpoint is missing '" + key + "'");
  return it->second;
}

std::size_t ToSize(const std::string& s) {
  return static_cast<std::size_t>(std::stoull(s));
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string payload;
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) PutMatrix(payload, ckpt.params.value(i));
  if (ckpt.optimizer) {
    for (const auto& m : ckpt.optimizer->first_moment) PutMatrix(payload, m);
    for (const auto& m : ckpt.optimizer->second_moment) PutMatrix(payload, m);
  }
  if (ckpt.ema) {
    Require(ckpt.ema->SameLayout(ckpt.params), ErrorCode::kDimension,
            "averaged weights do not match the parameters");
    for (std::size_t i = 0; i < ckpt.ema->size(); ++i) PutMatrix(payload, ckpt.ema->value(i));
  }
  std::ostringstream head;
  head << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  head << "step=" << ckpt.step << '\n';
  std::istringstream cfg(FormatConfig(ckpt.config));
  for (std::string line; std::getline(cfg, line);) {
    const auto eq = line.find(" = ");
    head << "config." << line.substr(0, eq) << '=' << line.substr(eq + 3) << '\n';
  }
  head << "corpus.count=" << ckpt.corpus.size() << '\n';
  for (std::size_t b = 0; b < ckpt.corpus.size(); ++b) {
    head << "corpus." << b << ".task=" << ckpt.corpus[b].task_prompt << '\n';
    head << "corpus." << b << ".forces=" << ckpt.corpus[b].force_prompts.size() << '\n';
    for (std::size_t f = 0; f < ckpt.corpus[b].force_prompts.size(); ++f)
      head << "corpus." << b << ".force." << f << '=' << ckpt.corpus[b].force_prompts[f] << '\n';
  }
  head << "norm.position.mean=" << JoinExact(ckpt.normalizers.position.mean) << '\n';
  head << "norm.position.scale=" << JoinExact(ckpt.normalizers.position.scale) << '\n';
  head << "norm.action.mean=" << JoinExact(ckpt.normalizers.action.mean) << '\n';
  head << "norm.action.scale=" << JoinExact(ckpt.normalizers.action.scale) << '\n';
  head << "param.count=" << ckpt.params.size() << '\n';
  for (std::size_t i = 0; i < ckpt.params.size(); ++i)
    head << "param." << i << '=' << ckpt.params.name(i) << ' ' << ckpt.params.value(i).rows()
         << ' ' << ckpt.params.value(i).cols() << '\n';
  head << "optimizer=" << (ckpt.optimizer ? 1 : 0) << '\n';
  if (ckpt.optimizer) head << "optimizer.step=" << ckpt.optimizer->step << '\n';
  head << "ema=" << (ckpt.ema ? 1 : 0) << '\n';
  head << "payload_bytes=" << payload.size() << '\n';
  head << "checksum=" << data::Hex32(data::Crc32(payload)) << '\n';
  head << '\n';
  return head.str() + payload;
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  const auto eol = bytes.find('\n');
  Require(eol != std::string_view::npos, ErrorCode::kTruncated, "checkpoint ends in its header");
  const std::string magic(bytes.substr(0, eol));
  Require(magic.rfind(std::string(kCheckpointMagic) + ' ', 0) == 0, ErrorCode::kVersionMismatch,
          "not a contactflow checkpoint");
  Require(magic == std::string(kCheckpointMagic) + ' ' + std::to_string(kCheckpointVersion),
          ErrorCode::kVersionMismatch, "unsupported checkpoint version: " + magic);
  const auto sep = bytes.find("\n\n", eol);
  Require(sep != std::string_view::npos, ErrorCode::kTruncated, "checkpoint ends in its manifest");
  const auto kv = data::ParseKeyValues(bytes.substr(eol + 1, sep - eol));
  const std::string_view payload = bytes.substr(sep + 2);
  Require(payload.size() == ToSize(Get(kv, "payload_bytes")), ErrorCode::kTruncated,
          "checkpoint payload size disagrees with its manifest");
  Require(data::Hex32(data::Crc32(payload)) == Get(kv, "checksum"), ErrorCode::kChecksum,
          "checkpoint checksum mismatch");

  Checkpoint ckpt;
  ckpt.step = std::stoull(Get(kv, "step"));
  for (const auto& [key, value] : kv)
    if (key.rfind("config.", 0) == 0) SetConfigValue(ckpt.config, key.substr(7), value);
  const std::size_t blocks = ToSize(Get(kv, "corpus.count"));
  for (std::size_t b = 0; b < blocks; ++b) {
    context::PromptBlock block;
    const std::string prefix = "corpus." + std::to_string(b);
    block.task_prompt = Get(kv, prefix + ".task");
    const std::size_t forces = ToSize(Get(kv, prefix + ".forces"));
    for (std::size_t f = 0; f < forces; ++f)
      block.force_prompts.push_back(Get(kv, prefix + ".force." + std::to_string(f)));
    ckpt.corpus.push_back(std::move(block));
  }
  ckpt.normalizers.position = {SplitExact(Get(kv, "norm.position.mean")),
                               SplitExact(Get(kv, "norm.position.scale"))};
  ckpt.normalizers.action = {SplitExact(Get(kv, "norm.action.mean")),
                             SplitExact(Get(kv, "norm.action.scale"))};
  Require(ckpt.normalizers.position.dims() == 3 && ckpt.normalizers.action.dims() == flow::kActionDim,
          ErrorCode::kIncompatible, "checkpoint normalizers have the wrong size");

  std::size_t pos = 0;
  const std::size_t count = ToSize(Get(kv, "param.count"));
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream in(Get(kv, "param." + std::to_string(i)));
    std::string name;
    std::size_t rows = 0, cols = 0;
    in >> name >> rows >> cols;
    nn::Matrix m(rows, cols);
    GetMatrix(payload, pos, m);
    ckpt.params.Add(name, std::move(m));
  }
  if (Get(kv, "optimizer") == "1") {
    nn::OptimizerState opt = nn::OptimizerState::For(ckpt.params);
    opt.step = std::stoull(Get(kv, "optimizer.step"));
    for (auto& m : opt.first_moment) GetMatrix(payload, pos, m);
    for (auto& m : opt.second_moment) GetMatrix(payload, pos, m);
    ckpt.optimizer = std::move(opt);
  }
  if (Get(kv, "ema") == "1") {
    nn::ParamSet ema = ckpt.params;
    for (std::size_t i = 0; i < ema.size(); ++i) GetMatrix(payload, pos, ema.mutable_value(i));
    ckpt.ema = std::move(ema);
  }
  Require(pos == payload.size(), ErrorCode::kTruncated, "checkpoint has trailing bytes");
  return ckpt;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  data::WriteFileBytes(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::string bytes;
  try {
    bytes = data::ReadFileBytes(path);
  } catch (const Error&) {
    Fail(ErrorCode::kMissingData, "cannot read checkpoint '" + path + "'");
  }
  return DeserializeCheckpoint(bytes);
}

void CheckCompatible(const RunConfig& checkpoint, const RunConfig& requested) {
  const auto ka = data::ParseKeyValues(FormatConfig(checkpoint));
  const auto kb = data::ParseKeyValues(FormatConfig(requested));
  for (std::string_view key : kModelKeys) {
    const std::string k(key);
    Require(ka.at(k) == kb.at(k), ErrorCode::kIncompatible,
            "checkpoint was trained with " + k + " = " + ka.at(k) + " but " + kb.at(k) +
                " was requested");
  }
}

LoadedPolicy RestorePolicy(Checkpoint ckpt) {
  const context::Vocabulary vocab = context::Vocabulary::Build(ckpt.corpus);
  const sim::VisualLayout layout;
  const ModelSpec spec = SpecFromConfig(ckpt.config, vocab, layout);
  nn::ParamSet fresh;
  nn::Rng rng(ckpt.config.seed);
  PolicyModel model = PolicyModel::Create(fresh, spec, rng);
  Require(fresh.SameLayout(ckpt.params), ErrorCode::kIncompatible,
          "checkpoint parameters do not match the model described by its config");
  return {std::move(ckpt), vocab, layout, std::move(model)};
}

}  // namespace cf::app
