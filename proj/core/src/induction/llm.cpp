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

#include "rulefuse/induction/llm.hpp"

#include <fstream>

#include "json.hpp"
#include "neural/http_post.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::induction {

using nlohmann::json;

HttpLlmClient::HttpLlmClient(ChatConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ValidationError("llm: endpoint is empty");
  if (config_.model.empty()) throw ValidationError("llm: model is empty");
}

std::string HttpLlmClient::complete(const std::string& prompt) {
  json messages = json::array();
  if (!config_.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", config_.system_prompt}});
  messages.push_back({{"role", "user"}, {"content", prompt}});
  const json body = {{"model", config_.model}, {"temperature", config_.temperature}, {"messages", messages}};
  const std::string response = neural::detail::post_json(
      {config_.endpoint, config_.token_env, config_.timeout_seconds, config_.max_retries}, "/v1/chat/completions",
      body.dump());
  try {
    return json::parse(response).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw LlmError(std::string("llm: malformed chat completion: ") + e.what());
  }
}

ScriptedLlmClient::ScriptedLlmClient(std::vector<Entry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), false) {}

ScriptedLlmClient::ScriptedLlmClient(ScriptedLlmClient&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.mu_);
  entries_ = std::move(other.entries_);
  used_ = std::move(other.used_);
  prompts_ = std::move(other.prompts_);
}

ScriptedLlmClient ScriptedLlmClient::from_jsonl(std::string_view jsonl) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json rec = json::parse(line);
      Entry e;
      e.reply = rec.at("reply").get<std::string>();
      e.prompt = rec.value("prompt", std::string());
      e.prompt_contains = rec.value("prompt_contains", std::string());
      e.repeat = rec.value("repeat", false);
      entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw FormatError(std::string("llm transcript: ") + e.what(), line_no);
    }
  }
  return ScriptedLlmClient(std::move(entries));
}

ScriptedLlmClient ScriptedLlmClient::load(const std::filesystem::path& path) {
  return from_jsonl(core::read_file(path));
}

std::string ScriptedLlmClient::complete(const std::string& prompt) {
  std::lock_guard<std::mutex> lock(mu_);
  prompts_.push_back(prompt);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (used_[i]) continue;
    const Entry& e = entries_[i];
    if (!e.prompt.empty() && e.prompt != prompt) continue;
    if (!e.prompt_contains.empty() && prompt.find(e.prompt_contains) == std::string::npos) continue;
    if (!e.repeat) used_[i] = true;
    return e.reply;
  }
  throw LlmError("llm transcript has no reply for this prompt");
}

std::vector<std::string> ScriptedLlmClient::prompts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_;
}

std::size_t ScriptedLlmClient::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) n += (!used_[i] && !entries_[i].repeat) ? 1 : 0;
  return n;
}

RecordingLlmClient::RecordingLlmClient(std::shared_ptr<LlmClient> inner, std::filesystem::path transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {
  if (transcript_.has_parent_path()) std::filesystem::create_directories(transcript_.parent_path());
}

std::string RecordingLlmClient::complete(const std::string& prompt) {
  std::string reply = inner_->complete(prompt);
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(transcript_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to transcript " + transcript_.string());
  out << json{{"prompt", prompt}, {"reply", reply}}.dump() << '\n';
  return reply;
}

}  // namespace rulefuse::induction
