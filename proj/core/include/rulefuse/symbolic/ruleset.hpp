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

// Weighted rule sets and their aggregation into per-candidate energies.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rulefuse/core/types.hpp"
#include "rulefuse/dsl/rule.hpp"

namespace rulefuse::symbolic {

struct Provenance {
  // "manual", "phase1" or "phase2".
  std::string phase = "manual";
  // OPTICS cluster the rule was induced from; -1 when not induced.
  int cluster_id = -1;
  std::size_t reflections = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct WeightedRule {
  dsl::RuleSource source;
  dsl::RuleAst ast;
  double weight = 1.0;
  Provenance provenance;
};

// An immutable ordered list of rules with non-negative weights. Every
// transformation returns a new set whose version is one higher.
class WeightedRuleSet {
 public:
  WeightedRuleSet() = default;

  // Parses each source; throws ValidationError on duplicate ids, negative or
  // non-finite weights, or a source that does not parse (naming the rule id).
  static WeightedRuleSet make(const std::vector<dsl::RuleSource>& sources, const std::vector<double>& weights,
                              const std::vector<Provenance>& provenance = {}, std::uint64_t version = 0);

  const std::vector<WeightedRule>& rules() const noexcept { return rules_; }
  const WeightedRule& at(std::size_t j) const { return rules_.at(j); }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  std::uint64_t version() const noexcept { return version_; }
  std::vector<double> weights() const;
  bool contains_id(const std::string& id) const;

  WeightedRuleSet with_rule(const dsl::RuleSource& source, double weight, Provenance provenance = {}) const;
  WeightedRuleSet without(const std::vector<std::size_t>& indices) const;
  WeightedRuleSet with_weights(const std::vector<double>& weights) const;
  WeightedRuleSet with_version(std::uint64_t version) const;

  // Sources, weights, provenance and version all equal.
  friend bool operator==(const WeightedRuleSet& a, const WeightedRuleSet& b);

 private:
  std::vector<WeightedRule> rules_;
  std::uint64_t version_ = 0;
};

struct Incident {
  std::string rule_id;
  std::size_t candidate = 0;
  dsl::EvalStatus status = dsl::EvalStatus::kOk;
  std::string message;
};

struct EnergyReport {
  // scores[i][j]: rule j on candidate i.
  std::vector<std::vector<double>> scores;
  std::vector<double> energies;
  std::vector<Incident> incidents;
  std::size_t division_by_zero = 0;
};

dsl::RuleContext rule_context(const core::ChoiceQuestion& question, std::size_t candidate);
dsl::RuleContext rule_context(const core::TransitionStep& step);

// Score of one rule on every candidate. Failed evaluations score 0 and are
// appended to `incidents` when it is non-null.
std::vector<double> rule_scores(const WeightedRule& rule, const core::ChoiceQuestion& question,
                                const dsl::EvalBudget& budget = {}, std::vector<Incident>* incidents = nullptr);

// E_i = sum_j w_j * scores[i][j], accumulated in rule order. Every code path
// that needs energies goes through this so results agree bit for bit.
double energy(const std::vector<double>& row, const std::vector<double>& weights);

EnergyReport score_matrix(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question,
                          const dsl::EvalBudget& budget = {});

// argmax_i E_i with lowest-index tie-break.
core::EvalOutcome symbolic_outcome(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question,
                                   const dsl::EvalBudget& budget = {});
std::size_t symbolic_predict(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question);

// Number of rules with a non-zero score on the step's own transition.
std::size_t active_rule_count(const WeightedRuleSet& ruleset, const core::TransitionStep& step,
                              const dsl::EvalBudget& budget = {});

// JSON: {"version", "rules": [{"id","description","source","weight","provenance"}]}
std::string ruleset_to_json(const WeightedRuleSet& ruleset);
WeightedRuleSet ruleset_from_json(std::string_view json);
void ruleset_save(const std::filesystem::path& path, const WeightedRuleSet& ruleset);
WeightedRuleSet ruleset_load(const std::filesystem::path& path);

}  // namespace rulefuse::symbolic
