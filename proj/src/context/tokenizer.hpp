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

#ifndef CONTACTFLOW_CONTEXT_TOKENIZER_HPP_
#define CONTACTFLOW_CONTEXT_TOKENIZER_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cf::context {

// One task in the prompt corpus: the global instruction plus one force prompt
// per subtask, in execution order.
struct PromptBlock {
  std::string task_prompt;
  std::vector<std::string> force_prompts;
};

// Corpus text: blocks separated by blank lines; line 1 of a block is the task
// prompt, every following line is a force prompt.
std::vector<PromptBlock> ParsePromptCorpus(std::string_view text);
std::vector<PromptBlock> ReadPromptCorpus(const std::string& path);
std::string FormatPromptCorpus(const std::vector<PromptBlock>& blocks);

struct PromptTokens {
  std::vector<std::size_t> task;
  std::vector<std::size_t> force;
  std::size_t vocab_size = 0;

  // Throws kDomain when a count is zero or an id is out of range.
  void Validate() const;
  std::size_t total() const noexcept { return task.size() + force.size(); }
};

// Whitespace word vocabulary. Id 0 is the padding token; words get ids in
// order of first appearance in the corpus. Task and force prompts are padded
// to the longest prompt of their kind so token counts never change when the
// force prompt does.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;

  static Vocabulary Build(const std::vector<PromptBlock>& corpus);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t task_length() const noexcept { return task_length_; }
  std::size_t force_length() const noexcept { return force_length_; }
  const std::string& word(std::size_t id) const { return words_.at(id); }
  std::size_t Id(std::string_view word) const;

  std::vector<std::size_t> EncodeTask(std::string_view text) const;
  std::vector<std::size_t> EncodeForce(std::string_view text) const;
  PromptTokens Encode(std::string_view task, std::string_view force) const;

 private:
  std::vector<std::size_t> EncodePadded(std::string_view text, std::size_t length) const;

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t task_length_ = 1;
  std::size_t force_length_ = 1;
};

std::vector<std::string> SplitWords(std::string_view text);

}  // namespace cf::context

#endif  // CONTACTFLOW_CONTEXT_TOKENIZER_HPP_
