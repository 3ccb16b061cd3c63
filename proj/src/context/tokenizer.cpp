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

#include "context/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace cf::context {

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

std::vector<PromptBlock> ParsePromptCorpus(std::string_view text) {
  std::vector<PromptBlock> blocks;
  PromptBlock current;
  bool open = false;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    const std::string line = Trim(raw);
    if (line.empty()) {
      if (open) blocks.push_back(std::move(current));
      current = {};
      open = false;
      continue;
    }
    if (!open) {
      current.task_prompt = line;
      open = true;
    } else {
      current.force_prompts.push_back(line);
    }
  }
  if (open) blocks.push_back(std::move(current));
  for (const auto& b : blocks)
    Require(!b.force_prompts.empty(), ErrorCode::kDomain,
            "prompt block '" + b.task_prompt + "' has no force prompts");
  return blocks;
}

std::vector<PromptBlock> ReadPromptCorpus(const std::string& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open prompt corpus " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParsePromptCorpus(ss.str());
}

std::string FormatPromptCorpus(const std::vector<PromptBlock>& blocks) {
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i > 0) out += "\n";
    out += blocks[i].task_prompt + "\n";
    for (const auto& f : blocks[i].force_prompts) out += f + "\n";
  }
  return out;
}

void PromptTokens::Validate() const {
  Require(!task.empty() && !force.empty(), ErrorCode::kDomain,
          "prompt token sequences must be non-empty");
  for (auto id : task)
    Require(id < vocab_size, ErrorCode::kDomain, "task token id out of vocabulary");
  for (auto id : force)
    Require(id < vocab_size, ErrorCode::kDomain, "force token id out of vocabulary");
}

Vocabulary Vocabulary::Build(const std::vector<PromptBlock>& corpus) {
  Vocabulary v;
  v.words_.push_back("<pad>");
  v.ids_.emplace("<pad>", kPad);
  auto add = [&v](const std::string& text) {
    const auto words = SplitWords(text);
    for (const auto& w : words) {
      if (v.ids_.contains(w)) continue;
      v.ids_.emplace(w, v.words_.size());
      v.words_.push_back(w);
    }
    return words.size();
  };
  for (const auto& block : corpus) {
    v.task_length_ = std::max(v.task_length_, add(block.task_prompt));
    for (const auto& f : block.force_prompts) v.force_length_ = std::max(v.force_length_, add(f));
  }
  return v;
}

std::size_t Vocabulary::Id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  Require(it != ids_.end(), ErrorCode::kDomain,
          "word '" + std::string(word) + "' is not in the vocabulary");
  return it->second;
}

std::vector<std::size_t> Vocabulary::EncodePadded(std::string_view text,
                                                  std::size_t length) const {
  const auto words = SplitWords(text);
  Require(words.size() <= length, ErrorCode::kDomain,
          "prompt '" + std::string(text) + "' is longer than the padded length");
  std::vector<std::size_t> ids(length, kPad);
  for (std::size_t i = 0; i < words.size(); ++i) ids[i] = Id(words[i]);
  return ids;
}

std::vector<std::size_t> Vocabulary::EncodeTask(std::string_view text) const {
  return EncodePadded(text, task_length_);
}

std::vector<std::size_t> Vocabulary::EncodeForce(std::string_view text) const {
  return EncodePadded(text, force_length_);
}

PromptTokens Vocabulary::Encode(std::string_view task, std::string_view force) const {
  return PromptTokens{EncodeTask(task), EncodeForce(force), size()};
}

}  // namespace cf::context
