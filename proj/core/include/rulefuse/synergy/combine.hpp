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

// Combining neural log-likelihoods with symbolic energies.
//
// The modified likelihood is p_i * exp(gamma * E_i); selection works on its
// logarithm, log p_i + gamma * E_i, which has the same argmax and cannot
// underflow.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rulefuse/core/types.hpp"
#include "rulefuse/neural/scorer.hpp"
#include "rulefuse/symbolic/ruleset.hpp"

namespace rulefuse::synergy {

enum class GammaKind { kFixed, kMaxLogGap };
// Whether max-log-gap is measured per question or averaged over a dataset.
enum class GammaScope { kPerQuestion, kPerDataset };

struct GammaPolicy {
  GammaKind kind = GammaKind::kFixed;
  double fixed_value = 1.0;
  GammaScope scope = GammaScope::kPerQuestion;

  static GammaPolicy fixed(double value = 1.0);
  static GammaPolicy max_log_gap(GammaScope scope = GammaScope::kPerQuestion);
  std::string describe() const;
};

// Accepts "max-log-gap", "fixed" (gamma 1), "fixed=<v>" or a bare number.
GammaPolicy parse_gamma(std::string_view text, std::string_view scope = "question");

// fixed -> fixed_value; max-log-gap -> max(loglikes) - min(loglikes).
double gamma_value(const GammaPolicy& policy, const std::vector<double>& loglikes);

// Per-dataset max-log-gap: mean of the per-question gaps.
double dataset_gamma(const std::vector<neural::ScoreVector>& scores);

struct CombinedScores {
  double gamma = 0.0;
  std::vector<double> modified;
  std::size_t chosen = 0;
  bool tie = false;
};

// Throws ValidationError on a length mismatch or non-finite input.
CombinedScores combine(const std::vector<double>& loglikes, const std::vector<double>& energies, double gamma);

core::EvalOutcome combined_outcome(const core::ChoiceQuestion& question, const neural::ScoreVector& scores,
                                   const symbolic::EnergyReport& report, double gamma);

// Scores with the neural model and the rules, then combines. Per-dataset
// gamma needs the batch form.
core::EvalOutcome combined_predict(const neural::ScorerHandle& scorer, const symbolic::WeightedRuleSet& ruleset,
                                   const GammaPolicy& policy, const core::ChoiceQuestion& question);

std::vector<core::EvalOutcome> combined_predict_batch(const neural::ScorerHandle& scorer,
                                                      const symbolic::WeightedRuleSet& ruleset,
                                                      const GammaPolicy& policy,
                                                      const std::vector<core::ChoiceQuestion>& questions,
                                                      std::size_t workers = 1);

double accuracy(const std::vector<core::EvalOutcome>& outcomes);

// Scores one dataset with the neural model once and memoises per-rule score
// columns, so accuracy under many candidate rule sets is cheap. Results are
// identical to combined_predict_batch on the same inputs.
class EvaluationCache {
 public:
  EvaluationCache(std::vector<core::ChoiceQuestion> questions, std::vector<neural::ScoreVector> scores,
                  GammaPolicy policy, dsl::EvalBudget budget = {}, std::size_t workers = 1);
  static EvaluationCache build(const neural::ScorerHandle& scorer, std::vector<core::ChoiceQuestion> questions,
                               GammaPolicy policy, std::size_t workers = 1);

  // column[q][i]: the rule's score on candidate i of question q.
  struct Column {
    std::vector<std::vector<double>> scores;
    std::vector<std::size_t> incidents;
  };

  const std::vector<core::ChoiceQuestion>& questions() const noexcept { return questions_; }
  const std::vector<neural::ScoreVector>& neural_scores() const noexcept { return scores_; }
  const GammaPolicy& policy() const noexcept { return policy_; }
  std::size_t size() const noexcept { return questions_.size(); }

  std::shared_ptr<const Column> column(const symbolic::WeightedRule& rule);
  std::shared_ptr<const Column> column(const dsl::RuleSource& source);

  std::vector<core::EvalOutcome> evaluate(const symbolic::WeightedRuleSet& ruleset);
  // Same as evaluate() but from explicit columns and weights.
  std::vector<core::EvalOutcome> evaluate(const std::vector<std::shared_ptr<const Column>>& columns,
                                          const std::vector<double>& weights) const;
  std::size_t correct_count(const symbolic::WeightedRuleSet& ruleset);

 private:
  std::vector<core::ChoiceQuestion> questions_;
  std::vector<neural::ScoreVector> scores_;
  GammaPolicy policy_;
  dsl::EvalBudget budget_;
  std::size_t workers_;
  std::vector<double> gammas_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Column>> columns_;
};

enum class PredictorMode { kNeural, kSymbolic, kCombined };
std::string_view predictor_mode_name(PredictorMode mode);

struct PredictorConfig {
  std::string id;
  PredictorMode mode = PredictorMode::kCombined;
  neural::ScorerHandle scorer;
  std::shared_ptr<const symbolic::WeightedRuleSet> ruleset;
  GammaPolicy policy;
};

core::EvalOutcome predict_with(const PredictorConfig& config, const core::ChoiceQuestion& question);

struct RouteResult {
  std::size_t config_index = 0;
  std::string config_id;
  core::EvalOutcome outcome;
};

// Analysis only: the first config that answers the question correctly, or the
// first config when none does. Throws ValidationError with no configs.
RouteResult oracle_route(const std::vector<PredictorConfig>& configs, const core::ChoiceQuestion& question);

}  // namespace rulefuse::synergy
