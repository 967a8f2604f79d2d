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

#include "rulefuse/neural/scorer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/parallel.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::neural {

using nlohmann::json;

namespace {

std::uint64_t parse_hex(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("mock table: bad fingerprint '" + s + "'");
  }
  return v;
}

}  // namespace

std::string_view normalization_name(Normalization n) {
  return n == Normalization::kSumLogprob ? "sum-logprob" : "per-token-mean";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "sum-logprob") return Normalization::kSumLogprob;
  if (name == "per-token-mean") return Normalization::kPerTokenMean;
  throw ValidationError("unknown normalization '" + std::string(name) + "' (expected sum-logprob or per-token-mean)");
}

std::vector<std::string> Scorer::generate(const GenerateRequest&) {
  throw ValidationError("scorer '" + kind() + "' does not support generation");
}

// ---------------------------------------------------------------------------
// MockTable

MockTable::MockTable(const MockTable& other)
    : default_loglike_(other.default_loglike_),
      entries_(other.entries_),
      samples_(other.samples_),
      misses_(other.misses_.load()) {}

MockTable& MockTable::operator=(const MockTable& other) {
  default_loglike_ = other.default_loglike_;
  entries_ = other.entries_;
  samples_ = other.samples_;
  misses_ = other.misses_.load();
  return *this;
}

std::uint64_t MockTable::fingerprint(const ScoreRequest& request) {
  std::uint64_t h = text::fnv1a64(request.context);
  for (const auto& c : request.continuations) {
    h = text::fnv1a64("\x1e", h);
    h = text::fnv1a64(c, h);
  }
  return h;
}

std::uint64_t MockTable::fingerprint(const GenerateRequest& request) {
  return text::fnv1a64(request.context, text::fnv1a64("generate\x1e"));
}

void MockTable::set(const ScoreRequest& request, Entry entry) {
  if (entry.loglikes.size() != request.continuations.size()) {
    throw ValidationError("mock table: loglike count does not match continuation count");
  }
  set(fingerprint(request), std::move(entry));
}

void MockTable::set(std::uint64_t fp, Entry entry) {
  for (double v : entry.loglikes) {
    if (!std::isfinite(v)) throw ValidationError("mock table: non-finite log-likelihood");
  }
  if (!entry.token_counts.empty() && entry.token_counts.size() != entry.loglikes.size()) {
    throw ValidationError("mock table: token_counts length does not match loglikes");
  }
  entries_[fp] = std::move(entry);
}

void MockTable::set_samples(const GenerateRequest& request, std::vector<std::string> samples) {
  samples_[fingerprint(request)] = std::move(samples);
}

bool MockTable::contains(const ScoreRequest& request) const { return entries_.count(fingerprint(request)) > 0; }

void MockTable::merge(const MockTable& other) {
  for (const auto& [fp, e] : other.entries_) entries_[fp] = e;
  for (const auto& [fp, s] : other.samples_) samples_[fp] = s;
}

std::size_t MockTable::misses() const { return misses_.load(); }

RawScores MockTable::score(const ScoreRequest& request) {
  const auto it = entries_.find(fingerprint(request));
  if (it == entries_.end()) {
    ++misses_;
    return {std::vector<double>(request.continuations.size(), default_loglike_), {}};
  }
  return {it->second.loglikes, it->second.token_counts};
}

std::vector<std::string> MockTable::generate(const GenerateRequest& request) {
  const auto it = samples_.find(fingerprint(request));
  if (it == samples_.end()) return {};
  return it->second;
}

std::string MockTable::to_json() const {
  json entries = json::array();
  for (const auto& [fp, e] : entries_) {
    json row = {{"fingerprint", text::to_hex(fp)}, {"loglikes", e.loglikes}};
    if (!e.token_counts.empty()) row["token_counts"] = e.token_counts;
    entries.push_back(std::move(row));
  }
  json samples = json::array();
  for (const auto& [fp, s] : samples_) samples.push_back({{"fingerprint", text::to_hex(fp)}, {"samples", s}});
  json doc = {{"default_loglike", default_loglike_}, {"entries", entries}};
  if (!samples.empty()) doc["samples"] = samples;
  return doc.dump() + "\n";
}

MockTable MockTable::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const double d = doc.value("default_loglike", 0.0);
    if (!std::isfinite(d)) throw FormatError("mock table: default_loglike must be finite");
    MockTable table(d);
    for (const auto& row : doc.value("entries", json::array())) {
      Entry e;
      e.loglikes = row.at("loglikes").get<std::vector<double>>();
      if (row.contains("token_counts")) e.token_counts = row.at("token_counts").get<std::vector<std::size_t>>();
      try {
        table.set(parse_hex(row.at("fingerprint").get<std::string>()), std::move(e));
      } catch (const ValidationError& err) {
        throw FormatError(err.what());
      }
    }
    for (const auto& row : doc.value("samples", json::array())) {
      table.samples_[parse_hex(row.at("fingerprint").get<std::string>())] =
          row.at("samples").get<std::vector<std::string>>();
    }
    return table;
  } catch (const json::exception& e) {
    throw FormatError(std::string("mock table: ") + e.what());
  }
}

void MockTable::save(const std::filesystem::path& path) const { core::write_file(path, to_json()); }

MockTable MockTable::load(const std::filesystem::path& path) { return from_json(core::read_file(path)); }

// ---------------------------------------------------------------------------
// Wire forms, recording and replay

std::string request_json(const ScoreRequest& request) {
  return json{{"context", request.context}, {"continuations", request.continuations}}.dump();
}

std::string request_json(const GenerateRequest& request) {
  return json{{"context", request.context}, {"n", request.n}, {"stop", request.stop}}.dump();
}

RawScores parse_score_response(std::string_view body) {
  try {
    const json doc = json::parse(body);
    RawScores out;
    out.loglikes = doc.at("loglikes").get<std::vector<double>>();
    if (doc.contains("token_counts")) out.token_counts = doc.at("token_counts").get<std::vector<std::size_t>>();
    return out;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed score response: ") + e.what());
  }
}

std::vector<std::string> parse_generate_response(std::string_view body) {
  try {
    return json::parse(body).at("samples").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed generate response: ") + e.what());
  }
}

namespace {

std::string score_response_json(const RawScores& r) {
  json doc = {{"loglikes", r.loglikes}};
  if (!r.token_counts.empty()) doc["token_counts"] = r.token_counts;
  return doc.dump();
}

std::string transcript_key(std::string_view op, const std::string& request) { return std::string(op) + "\n" + request; }

}  // namespace

RecordingScorer::RecordingScorer(std::shared_ptr<Scorer> inner, std::filesystem::path transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {
  if (transcript_.has_parent_path()) std::filesystem::create_directories(transcript_.parent_path());
}

void RecordingScorer::append(const std::string& line) {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(transcript_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to transcript " + transcript_.string());
  out << line << '\n';
}

RawScores RecordingScorer::score(const ScoreRequest& request) {
  RawScores r = inner_->score(request);
  append(json{{"op", "score"},
              {"request", json::parse(request_json(request))},
              {"response", json::parse(score_response_json(r))}}
             .dump());
  return r;
}

std::vector<std::string> RecordingScorer::generate(const GenerateRequest& request) {
  std::vector<std::string> samples = inner_->generate(request);
  append(json{{"op", "generate"}, {"request", json::parse(request_json(request))}, {"response", {{"samples", samples}}}}
             .dump());
  return samples;
}

ReplayScorer::ReplayScorer(const std::filesystem::path& transcript) {
  const std::string body = core::read_file(transcript);
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(body)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json rec = json::parse(line);
      const std::string op = rec.at("op").get<std::string>();
      responses_[transcript_key(op, rec.at("request").dump())] = rec.at("response").dump();
    } catch (const json::exception& e) {
      throw FormatError(std::string("transcript: ") + e.what(), line_no);
    }
  }
}

RawScores ReplayScorer::score(const ScoreRequest& request) {
  const auto it = responses_.find(transcript_key("score", request_json(request)));
  if (it == responses_.end()) throw ProtocolError("replay: no recorded response for score request");
  return parse_score_response(it->second);
}

std::vector<std::string> ReplayScorer::generate(const GenerateRequest& request) {
  const auto it = responses_.find(transcript_key("generate", request_json(request)));
  if (it == responses_.end()) throw ProtocolError("replay: no recorded response for generate request");
  return parse_generate_response(it->second);
}

// ---------------------------------------------------------------------------
// Scoring

std::vector<double> softmax(const std::vector<double>& loglikes) {
  if (loglikes.empty()) return {};
  const double top = *std::max_element(loglikes.begin(), loglikes.end());
  std::vector<double> p(loglikes.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(loglikes[i] - top);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

std::string scoring_context(const core::BeliefState& belief, const core::ActionText& action) {
  std::string ctx = belief.rendered;
  if (!ctx.empty() && ctx.back() == '\n') ctx.pop_back();
  return ctx + "\nAction: " + action.value();
}

ScoreRequest score_request(const core::ChoiceQuestion& question) {
  ScoreRequest req;
  req.context = scoring_context(question.belief, question.action);
  for (const auto& c : question.candidates) req.continuations.push_back(core::candidate_text(c));
  return req;
}

std::size_t approx_token_count(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return std::max<std::size_t>(1, n);
}

ScoreVector score_candidates(const ScorerHandle& handle, const core::ChoiceQuestion& question) {
  if (!handle.scorer) throw ValidationError("no scorer configured");
  const ScoreRequest req = score_request(question);
  RawScores raw = handle.scorer->score(req);
  if (raw.loglikes.size() != question.size()) {
    throw ProtocolError("question '" + question.id + "': scorer returned " + std::to_string(raw.loglikes.size()) +
                        " log-likelihoods for " + std::to_string(question.size()) + " candidates");
  }
  for (double v : raw.loglikes) {
    if (!std::isfinite(v)) throw ProtocolError("question '" + question.id + "': non-finite log-likelihood");
  }
  if (handle.normalization == Normalization::kPerTokenMean) {
    if (!raw.token_counts.empty() && raw.token_counts.size() != raw.loglikes.size()) {
      throw ProtocolError("question '" + question.id + "': token_counts length mismatch");
    }
    for (std::size_t i = 0; i < raw.loglikes.size(); ++i) {
      const std::size_t n = raw.token_counts.empty() ? approx_token_count(req.continuations[i])
                                                     : std::max<std::size_t>(1, raw.token_counts[i]);
      raw.loglikes[i] /= static_cast<double>(n);
    }
  }
  ScoreVector out;
  out.probs = softmax(raw.loglikes);
  out.loglikes = std::move(raw.loglikes);
  return out;
}

std::vector<ScoreVector> score_batch(const ScorerHandle& scorer, const std::vector<core::ChoiceQuestion>& questions,
                                     std::size_t workers) {
  std::vector<ScoreVector> out(questions.size());
  core::parallel_for(questions.size(), workers, [&](std::size_t i) { out[i] = score_candidates(scorer, questions[i]); });
  return out;
}

core::EvalOutcome neural_outcome(const core::ChoiceQuestion& question, const ScoreVector& scores) {
  const core::ArgMax best = core::argmax(scores.loglikes);
  core::EvalOutcome out;
  out.question_id = question.id;
  out.chosen_index = best.index;
  out.gold_index = question.gold_index;
  out.correct = best.index == question.gold_index;
  out.tie = best.tie;
  out.per_candidate_scores = scores.loglikes;
  out.energies.assign(question.size(), 0.0);
  out.category = question.category;
  return out;
}

std::size_t neural_predict(const ScorerHandle& scorer, const core::ChoiceQuestion& question) {
  return core::argmax(score_candidates(scorer, question).loglikes).index;
}

// ---------------------------------------------------------------------------
// Generation

bool parse_candidate(std::string_view sample, core::Candidate& out) {
  std::vector<std::string> lines = text::split_lines(sample);
  while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
  if (lines.size() < 2) return false;
  const std::string_view last = text::trim(lines.back());
  constexpr std::string_view kPrefix = "reward:";
  if (!text::starts_with(last, kPrefix)) return false;
  const std::string_view num = text::trim(last.substr(kPrefix.size()));
  double reward = 0.0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), reward);
  if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(reward)) return false;
  lines.pop_back();
  const std::string state(text::trim(text::join(lines, "\n")));
  if (state.empty()) return false;
  out.next_state = state;
  out.reward = reward;
  return true;
}

GenerationResult generate_candidates(const ScorerHandle& generator, const core::BeliefState& belief,
                                     const core::ActionText& action, std::size_t k) {
  if (!generator.scorer) throw ValidationError("no generator configured");
  if (k == 0) throw ValidationError("generate_candidates: K must be positive");
  GenerateRequest req{scoring_context(belief, action), k, {}};
  const std::vector<std::string> samples = generator.scorer->generate(req);
  GenerationResult result;
  std::set<std::pair<std::string, double>> seen;
  for (std::size_t s = 0; s < samples.size() && result.candidates.size() < k; ++s) {
    core::Candidate c;
    if (!parse_candidate(samples[s], c)) {
      result.incidents.push_back("sample " + std::to_string(s) + ": cannot split next state and reward line");
      continue;
    }
    if (seen.insert({c.next_state, c.reward}).second) result.candidates.push_back(std::move(c));
  }
  result.short_count = result.candidates.size() < k;
  return result;
}

}  // namespace rulefuse::neural
