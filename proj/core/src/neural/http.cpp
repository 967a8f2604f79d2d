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

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "neural/http_post.hpp"
#include "rulefuse/neural/scorer.hpp"

namespace rulefuse::neural {

namespace detail {

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw ValidationError("endpoint '" + endpoint + "' must start with http://");
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, slash), prefix};
}

}  // namespace

std::string post_json(const HttpTarget& target, const std::string& path, const std::string& body) {
  const auto [base, prefix] = split_endpoint(target.endpoint);
  httplib::Headers headers;
  if (!target.token_env.empty()) {
    const char* token = std::getenv(target.token_env.c_str());
    if (!token || !*token) throw ValidationError("environment variable " + target.token_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= target.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 * (1 << std::min<std::size_t>(attempt, 6))));
    httplib::Client client(base);
    const auto timeout = std::chrono::duration<double>(target.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    const auto res = client.Post(prefix + path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw ProtocolError(target.endpoint + path + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  throw TransportError(target.endpoint + path + ": " + last_error + " after " + std::to_string(target.max_retries + 1) +
                       " attempts");
}

}  // namespace detail

HttpScorer::HttpScorer(HttpConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ValidationError("external scorer: endpoint is empty");
}

std::string HttpScorer::call(const std::string& path, const std::string& body) const {
  return detail::post_json({config_.endpoint, config_.token_env, config_.timeout_seconds, config_.max_retries}, path,
                           body);
}

RawScores HttpScorer::score(const ScoreRequest& request) {
  return parse_score_response(call("/v1/score", request_json(request)));
}

std::vector<std::string> HttpScorer::generate(const GenerateRequest& request) {
  return parse_generate_response(call("/v1/generate", request_json(request)));
}

}  // namespace rulefuse::neural
