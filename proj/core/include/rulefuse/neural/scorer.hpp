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

// Neural world-model scorers: per-candidate log-likelihoods and sampling.
//
// A scorer sees a context string (the rendered belief plus the action) and a
// list of continuation texts (one per candidate) and returns one
// log-likelihood per continuation. Implementations here are a fingerprint
// table (tests, offline runs), an HTTP client for the JSON scoring protocol
// in docs/scorer_protocol.md, and record/replay wrappers around any scorer.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/types.hpp"

namespace rulefuse::neural {

// Network or server failure; safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "transport"; }
};

// Malformed or inconsistent response; retrying will not help.
class ProtocolError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "protocol"; }
};

enum class Normalization { kSumLogprob, kPerTokenMean };
std::string_view normalization_name(Normalization n);
Normalization parse_normalization(std::string_view name);

struct ScoreRequest {
  std::string context;
  std::vector<std::string> continuations;
};

struct RawScores {
  std::vector<double> loglikes;
  // Optional continuation lengths in tokens, used by per-token-mean.
  std::vector<std::size_t> token_counts;
};

struct GenerateRequest {
  std::string context;
  std::size_t n = 1;
  std::vector<std::string> stop;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string kind() const = 0;
  virtual RawScores score(const ScoreRequest& request) = 0;
  // Throws ValidationError when the scorer cannot sample.
  virtual std::vector<std::string> generate(const GenerateRequest& request);
};

// Fingerprint-keyed table of canned log-likelihoods. Misses return
// `default_loglike` for every continuation.
class MockTable : public Scorer {
 public:
  struct Entry {
    std::vector<double> loglikes;
    std::vector<std::size_t> token_counts;
  };

  explicit MockTable(double default_loglike = 0.0) : default_loglike_(default_loglike) {}
  MockTable(const MockTable& other);
  MockTable& operator=(const MockTable& other);

  static std::uint64_t fingerprint(const ScoreRequest& request);
  static std::uint64_t fingerprint(const GenerateRequest& request);

  void set(const ScoreRequest& request, Entry entry);
  void set(std::uint64_t fingerprint, Entry entry);
  void set_samples(const GenerateRequest& request, std::vector<std::string> samples);
  bool contains(const ScoreRequest& request) const;
  // Copies every entry and sample list of `other`, replacing existing keys.
  void merge(const MockTable& other);
  std::size_t size() const noexcept { return entries_.size(); }
  double default_loglike() const noexcept { return default_loglike_; }
  std::size_t misses() const;

  std::string kind() const override { return "mock-table"; }
  RawScores score(const ScoreRequest& request) override;
  std::vector<std::string> generate(const GenerateRequest& request) override;

  // {"default_loglike": x, "entries": [{"fingerprint": hex, "loglikes": [...],
  //  "token_counts": [...]?}], "samples": [{"fingerprint": hex, "samples": [...]}]}
  std::string to_json() const;
  static MockTable from_json(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static MockTable load(const std::filesystem::path& path);

 private:
  double default_loglike_;
  std::map<std::uint64_t, Entry> entries_;
  std::map<std::uint64_t, std::vector<std::string>> samples_;
  std::atomic<std::size_t> misses_{0};
};

struct HttpConfig {
  // Base URL, e.g. "http://127.0.0.1:8080".
  std::string endpoint;
  // Name of the environment variable holding a bearer token; empty for none.
  std::string token_env;
  double timeout_seconds = 60.0;
  std::size_t max_retries = 2;
};

// Client for POST /v1/score and POST /v1/generate.
class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(HttpConfig config);
  std::string kind() const override { return "external-protocol"; }
  RawScores score(const ScoreRequest& request) override;
  std::vector<std::string> generate(const GenerateRequest& request) override;

 private:
  std::string call(const std::string& path, const std::string& body) const;
  HttpConfig config_;
};

// Wraps a scorer and appends every exchange to a JSON Lines transcript:
//   {"op": "score"|"generate", "request": {...}, "response": {...}}
class RecordingScorer : public Scorer {
 public:
  RecordingScorer(std::shared_ptr<Scorer> inner, std::filesystem::path transcript);
  std::string kind() const override { return inner_->kind(); }
  RawScores score(const ScoreRequest& request) override;
  std::vector<std::string> generate(const GenerateRequest& request) override;

 private:
  void append(const std::string& line);
  std::shared_ptr<Scorer> inner_;
  std::filesystem::path transcript_;
  std::mutex mu_;
};

// Serves responses from a transcript written by RecordingScorer. Requests
// are matched on their exact content; an unknown request is a ProtocolError.
class ReplayScorer : public Scorer {
 public:
  explicit ReplayScorer(const std::filesystem::path& transcript);
  std::string kind() const override { return "replay"; }
  RawScores score(const ScoreRequest& request) override;
  std::vector<std::string> generate(const GenerateRequest& request) override;
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

// JSON wire forms shared by the HTTP client and transcripts.
std::string request_json(const ScoreRequest& request);
std::string request_json(const GenerateRequest& request);
RawScores parse_score_response(std::string_view body);
std::vector<std::string> parse_generate_response(std::string_view body);

struct ScorerHandle {
  std::shared_ptr<Scorer> scorer;
  Normalization normalization = Normalization::kSumLogprob;
};

struct ScoreVector {
  std::vector<double> loglikes;
  std::vector<double> probs;
};

std::vector<double> softmax(const std::vector<double>& loglikes);

// Context: rendered belief, then "\nAction: <action>".
std::string scoring_context(const core::BeliefState& belief, const core::ActionText& action);
ScoreRequest score_request(const core::ChoiceQuestion& question);

// Whitespace-separated word count, at least 1.
std::size_t approx_token_count(std::string_view text);

// Throws ProtocolError on a count mismatch or non-finite value; transport
// errors propagate.
ScoreVector score_candidates(const ScorerHandle& scorer, const core::ChoiceQuestion& question);
std::vector<ScoreVector> score_batch(const ScorerHandle& scorer, const std::vector<core::ChoiceQuestion>& questions,
                                     std::size_t workers = 1);

core::EvalOutcome neural_outcome(const core::ChoiceQuestion& question, const ScoreVector& scores);
std::size_t neural_predict(const ScorerHandle& scorer, const core::ChoiceQuestion& question);

struct GenerationResult {
  std::vector<core::Candidate> candidates;
  // One message per skipped sample.
  std::vector<std::string> incidents;
  // Set when fewer than K distinct candidates were produced.
  bool short_count = false;
};

// Parses "<next state>\nreward: <number>"; the reward line is the last
// non-empty line. Returns false when it is missing or not a number.
bool parse_candidate(std::string_view sample, core::Candidate& out);

GenerationResult generate_candidates(const ScorerHandle& generator, const core::BeliefState& belief,
                                     const core::ActionText& action, std::size_t k);

}  // namespace rulefuse::neural
