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

// Rule induction: propose a rule per error cluster, keep it only when it
// strictly improves development accuracy, and prune harmful rules.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rulefuse/induction/cases.hpp"
#include "rulefuse/induction/llm.hpp"
#include "rulefuse/induction/optics.hpp"
#include "rulefuse/induction/prompts.hpp"
#include "rulefuse/symbolic/ruleset.hpp"
#include "rulefuse/synergy/combine.hpp"

namespace rulefuse::induction {

struct VerifyResult {
  bool accepted = false;
  std::size_t correct_before = 0;
  std::size_t correct_after = 0;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  double delta = 0.0;
  // Question ids that became correct / incorrect with the rule added.
  std::vector<std::string> fixed;
  std::vector<std::string> broken;
  // Index chosen for each broken question once the rule is added.
  std::vector<std::size_t> broken_chosen;
};

// Compares dev accuracy of the combined predictor with `ruleset` and with
// `ruleset` plus `candidate` at weight 1. Accepted iff strictly better.
VerifyResult verify_rule(const dsl::RuleSource& candidate, const symbolic::WeightedRuleSet& ruleset,
                         synergy::EvaluationCache& dev);

enum class Verdict { kAccepted, kRejected, kParseFailed, kAbandoned };
std::string_view verdict_name(Verdict v);

struct InductionAttempt {
  int cluster_id = -1;
  CaseField field = CaseField::kQuestion;
  std::size_t cluster_size = 0;
  std::string prompt;
  std::string reply;
  std::string description;
  std::string source;
  std::size_t reflection_round = 0;
  Verdict verdict = Verdict::kRejected;
  std::string diagnostics;
  VerifyResult verify;
};

struct ReflectionResult {
  bool ok = false;
  std::string description;
  std::string source;
  std::string prompt;
  std::string reply;
  std::string diagnostics;
};

// One reflection round: asks for a revision of the attempt's rule given the
// cases it broke, and increments attempt.reflection_round. A reply that does
// not parse still consumes the round.
ReflectionResult reflect_rule(LlmClient& llm, InductionAttempt& attempt, const std::vector<ErrorCase>& broken_cases,
                              const PromptTemplate& tmpl);

struct CleanResult {
  symbolic::WeightedRuleSet ruleset;
  std::vector<std::string> removed;
};

// Single pass in rule order: a rule is dropped when removing it from the
// current (already pruned) set strictly increases dev accuracy. The version
// is incremented even when nothing is removed.
CleanResult clean_rules(const symbolic::WeightedRuleSet& ruleset, synergy::EvaluationCache& dev);

struct InductionOptions {
  std::string phase = "phase1";
  std::size_t max_accepted_rules = 32;
  std::size_t max_reflections = 3;
  // 0 means every cluster.
  std::size_t max_clusters = 0;
  ClusterParams cluster;
  std::string template_id = "generic";
};

struct InductionResult {
  symbolic::WeightedRuleSet ruleset;
  std::vector<ErrorCase> errors;
  std::vector<Cluster> clusters;
  std::vector<InductionAttempt> attempts;
  std::vector<std::string> incidents;
  std::size_t accepted = 0;
};

// Collects the errors of the combined predictor with `start` on the dev
// set, clusters them and asks the model for one rule per cluster, largest
// first. Each proposal is verified against the latest accepted rule set; a
// rejected proposal gets up to max_reflections revisions and is abandoned
// when they run out. Accepted rules join with weight 1. LLM failures abandon
// the attempt and are recorded.
InductionResult induce_rules(const symbolic::WeightedRuleSet& start, synergy::EvaluationCache& dev, LlmClient& llm,
                             const PromptTemplate& tmpl, const InductionOptions& options = {});

}  // namespace rulefuse::induction
