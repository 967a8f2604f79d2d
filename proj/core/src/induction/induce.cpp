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

#include "rulefuse/induction/induce.hpp"

#include <map>

#include "rulefuse/core/error.hpp"

namespace rulefuse::induction {

namespace {

std::size_t count_correct(const std::vector<core::EvalOutcome>& outcomes) {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.correct ? 1 : 0;
  return n;
}

double ratio(std::size_t num, std::size_t den) { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }

std::vector<ErrorCase> broken_cases(const VerifyResult& v, const synergy::EvaluationCache& dev) {
  std::map<std::string, const core::ChoiceQuestion*> by_id;
  for (const auto& q : dev.questions()) by_id[q.id] = &q;
  std::vector<ErrorCase> out;
  for (std::size_t i = 0; i < v.broken.size(); ++i) out.push_back(make_case(*by_id.at(v.broken[i]), v.broken_chosen[i]));
  return out;
}

std::string unique_rule_id(const symbolic::WeightedRuleSet& rules, const std::string& base) {
  if (!rules.contains_id(base)) return base;
  for (std::size_t n = 2;; ++n) {
    const std::string id = base + "-" + std::to_string(n);
    if (!rules.contains_id(id)) return id;
  }
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kAccepted: return "accepted";
    case Verdict::kRejected: return "rejected";
    case Verdict::kParseFailed: return "parse-failed";
    case Verdict::kAbandoned: return "abandoned";
  }
  return "?";
}

VerifyResult verify_rule(const dsl::RuleSource& candidate, const symbolic::WeightedRuleSet& ruleset,
                         synergy::EvaluationCache& dev) {
  std::vector<std::shared_ptr<const synergy::EvaluationCache::Column>> cols;
  for (const auto& r : ruleset.rules()) cols.push_back(dev.column(r));
  std::vector<double> weights = ruleset.weights();
  const auto before = dev.evaluate(cols, weights);
  cols.push_back(dev.column(candidate));
  weights.push_back(1.0);
  const auto after = dev.evaluate(cols, weights);

  VerifyResult v;
  v.correct_before = count_correct(before);
  v.correct_after = count_correct(after);
  v.accuracy_before = ratio(v.correct_before, before.size());
  v.accuracy_after = ratio(v.correct_after, after.size());
  v.delta = v.accuracy_after - v.accuracy_before;
  v.accepted = v.correct_after > v.correct_before;
  for (std::size_t q = 0; q < before.size(); ++q) {
    if (!before[q].correct && after[q].correct) v.fixed.push_back(before[q].question_id);
    if (before[q].correct && !after[q].correct) {
      v.broken.push_back(before[q].question_id);
      v.broken_chosen.push_back(after[q].chosen_index);
    }
  }
  return v;
}

ReflectionResult reflect_rule(LlmClient& llm, InductionAttempt& attempt, const std::vector<ErrorCase>& broken,
                              const PromptTemplate& tmpl) {
  if (attempt.verdict != Verdict::kRejected) throw ValidationError("reflect_rule: attempt was not rejected");
  ReflectionResult r;
  r.prompt = build_reflection_prompt(attempt.description, attempt.source, broken, tmpl);
  ++attempt.reflection_round;
  r.reply = llm.complete(r.prompt);
  const ParsedReply parsed = parse_rule_reply(r.reply);
  r.ok = parsed.ok;
  r.description = parsed.description;
  r.source = parsed.source;
  r.diagnostics = parsed.diagnostics;
  return r;
}

CleanResult clean_rules(const symbolic::WeightedRuleSet& ruleset, synergy::EvaluationCache& dev) {
  CleanResult out;
  out.ruleset = ruleset;
  for (const auto& rule : ruleset.rules()) {
    std::size_t index = 0;
    while (out.ruleset.at(index).source.id != rule.source.id) ++index;
    const symbolic::WeightedRuleSet without = out.ruleset.without({index});
    if (dev.correct_count(without) > dev.correct_count(out.ruleset)) {
      out.removed.push_back(rule.source.id);
      out.ruleset = without;
    }
  }
  out.ruleset = out.ruleset.with_version(ruleset.version() + 1);
  return out;
}

InductionResult induce_rules(const symbolic::WeightedRuleSet& start, synergy::EvaluationCache& dev, LlmClient& llm,
                             const PromptTemplate& tmpl, const InductionOptions& options) {
  InductionResult result;
  result.ruleset = start;
  result.errors = collect_errors(dev.evaluate(start), dev.questions());
  result.clusters = cluster_all_fields(result.errors, options.cluster);

  const std::size_t limit =
      options.max_clusters == 0 ? result.clusters.size() : std::min(options.max_clusters, result.clusters.size());
  for (std::size_t c = 0; c < limit && result.accepted < options.max_accepted_rules; ++c) {
    const Cluster& cluster = result.clusters[c];
    InductionAttempt attempt;
    attempt.cluster_id = cluster.id;
    attempt.field = cluster.field;
    attempt.cluster_size = cluster.members.size();
    attempt.prompt = build_induction_prompt(cluster, result.errors, tmpl);
    const std::string where = "cluster " + std::to_string(cluster.id);
    try {
      attempt.reply = llm.complete(attempt.prompt);
    } catch (const Error& e) {
      attempt.verdict = Verdict::kAbandoned;
      attempt.diagnostics = e.what();
      result.incidents.push_back(where + ": " + e.what());
      result.attempts.push_back(std::move(attempt));
      continue;
    }
    const ParsedReply parsed = parse_rule_reply(attempt.reply);
    if (!parsed.ok) {
      attempt.verdict = Verdict::kParseFailed;
      attempt.diagnostics = parsed.diagnostics;
      result.incidents.push_back(where + ": " + parsed.diagnostics);
      result.attempts.push_back(std::move(attempt));
      continue;
    }
    attempt.description = parsed.description;
    attempt.source = parsed.source;
    const std::string id = unique_rule_id(result.ruleset, options.phase + "-c" + std::to_string(cluster.id));
    attempt.verify = verify_rule({id, attempt.description, attempt.source}, result.ruleset, dev);
    attempt.verdict = attempt.verify.accepted ? Verdict::kAccepted : Verdict::kRejected;

    while (attempt.verdict == Verdict::kRejected && !attempt.verify.broken.empty() &&
           attempt.reflection_round < options.max_reflections) {
      ReflectionResult r;
      try {
        r = reflect_rule(llm, attempt, broken_cases(attempt.verify, dev), tmpl);
      } catch (const Error& e) {
        result.incidents.push_back(where + ": reflection: " + e.what());
        attempt.diagnostics = e.what();
        attempt.verdict = Verdict::kAbandoned;
        break;
      }
      if (!r.ok) {
        attempt.diagnostics = r.diagnostics;
        result.incidents.push_back(where + ": reflection " + std::to_string(attempt.reflection_round) + ": " +
                                   r.diagnostics);
        continue;
      }
      attempt.description = r.description;
      attempt.source = r.source;
      attempt.verify = verify_rule({id, attempt.description, attempt.source}, result.ruleset, dev);
      attempt.verdict = attempt.verify.accepted ? Verdict::kAccepted : Verdict::kRejected;
    }

    if (attempt.verdict == Verdict::kRejected && attempt.reflection_round > 0 &&
        attempt.reflection_round >= options.max_reflections)
      attempt.verdict = Verdict::kAbandoned;

    if (attempt.verdict == Verdict::kAccepted) {
      symbolic::Provenance prov{options.phase, cluster.id, attempt.reflection_round};
      result.ruleset = result.ruleset.with_rule({id, attempt.description, attempt.source}, 1.0, prov);
      ++result.accepted;
    }
    result.attempts.push_back(std::move(attempt));
  }
  return result;
}

}  // namespace rulefuse::induction
