// Copyright 2026 The RuleFuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Clients for the language model that proposes rules.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rulefuse/core/error.hpp"

namespace rulefuse::induction {

class LlmError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "llm"; }
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the reply to a single user prompt. Throws LlmError (or a
  // transport error) on failure.
  virtual std::string complete(const std::string& prompt) = 0;
};

struct ChatConfig {
  // Base URL; requests go to <endpoint>/v1/chat/completions.
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string token_env;
  std::string system_prompt;
  double timeout_seconds = 120.0;
  std::size_t max_retries = 2;
};

// Chat-completions style HTTP client.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(ChatConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  ChatConfig config_;
};

// Canned replies read from a JSON Lines transcript. Each line is
//   {"reply": "...", "prompt": "..." | "prompt_contains": "...", "repeat": bool}
// A prompt is answered by the first unconsumed entry whose matcher accepts
// it (an entry without a matcher accepts anything). Entries are consumed
// unless "repeat" is true. An unmatched prompt throws LlmError.
class ScriptedLlmClient : public LlmClient {
 public:
  struct Entry {
    std::string prompt;
    std::string prompt_contains;
    std::string reply;
    bool repeat = false;
  };

  explicit ScriptedLlmClient(std::vector<Entry> entries);
  ScriptedLlmClient(ScriptedLlmClient&& other) noexcept;
  static ScriptedLlmClient from_jsonl(std::string_view jsonl);
  static ScriptedLlmClient load(const std::filesystem::path& path);

  std::string complete(const std::string& prompt) override;
  std::vector<std::string> prompts() const;
  std::size_t remaining() const;

 private:
  std::vector<Entry> entries_;
  std::vector<bool> used_;
  std::vector<std::string> prompts_;
  mutable std::mutex mu_;
};

// Appends {"prompt", "reply"} lines to a transcript that ScriptedLlmClient can
// replay.
class RecordingLlmClient : public LlmClient {
 public:
  RecordingLlmClient(std::shared_ptr<LlmClient> inner, std::filesystem::path transcript);
  std::string complete(const std::string& prompt) override;

 private:
  std::shared_ptr<LlmClient> inner_;
  std::filesystem::path transcript_;
  std::mutex mu_;
};

}  // namespace rulefuse::induction
