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

#include "rulefuse/synergy/combine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "rulefuse/core/parallel.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::synergy {

GammaPolicy GammaPolicy::fixed(double value) {
  if (!std::isfinite(value)) throw ValidationError("gamma must be finite");
  return {GammaKind::kFixed, value, GammaScope::kPerQuestion};
}

GammaPolicy GammaPolicy::max_log_gap(GammaScope scope) { return {GammaKind::kMaxLogGap, 1.0, scope}; }

std::string GammaPolicy::describe() const {
  if (kind == GammaKind::kFixed) return "fixed(" + text::format_number(fixed_value) + ")";
  return scope == GammaScope::kPerQuestion ? "max-log-gap(question)" : "max-log-gap(dataset)";
}

GammaPolicy parse_gamma(std::string_view text, std::string_view scope) {
  GammaScope s;
  if (scope == "question") {
    s = GammaScope::kPerQuestion;
  } else if (scope == "dataset") {
    s = GammaScope::kPerDataset;
  } else {
    throw ValidationError("unknown gamma scope '" + std::string(scope) + "' (expected question or dataset)");
  }
  if (text == "max-log-gap") return GammaPolicy::max_log_gap(s);
  if (text == "fixed") return GammaPolicy::fixed(1.0);
  if (text.substr(0, 6) == "fixed=") text.remove_prefix(6);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("gamma must be a number or 'max-log-gap', got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) throw ValidationError("gamma must be finite, got '" + std::string(text) + "'");
  return GammaPolicy::fixed(v);
}

double gamma_value(const GammaPolicy& policy, const std::vector<double>& loglikes) {
  if (policy.kind == GammaKind::kFixed) return policy.fixed_value;
  if (loglikes.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(loglikes.begin(), loglikes.end());
  return *hi - *lo;
}

double dataset_gamma(const std::vector<neural::ScoreVector>& scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : scores) sum += gamma_value(GammaPolicy::max_log_gap(), s.loglikes);
  return sum / static_cast<double>(scores.size());
}

CombinedScores combine(const std::vector<double>& loglikes, const std::vector<double>& energies, double gamma) {
  if (loglikes.size() != energies.size()) {
    throw ValidationError("combine: " + std::to_string(loglikes.size()) + " log-likelihoods but " +
                          std::to_string(energies.size()) + " energies");
  }
  if (!std::isfinite(gamma)) throw ValidationError("combine: gamma is not finite");
  CombinedScores out;
  out.gamma = gamma;
  out.modified.resize(loglikes.size());
  for (std::size_t i = 0; i < loglikes.size(); ++i) {
    if (!std::isfinite(loglikes[i]) || !std::isfinite(energies[i])) throw ValidationError("combine: non-finite input");
    out.modified[i] = loglikes[i] + gamma * energies[i];
  }
  const core::ArgMax best = core::argmax(out.modified);
  out.chosen = best.index;
  out.tie = best.tie;
  return out;
}

namespace {

core::EvalOutcome outcome_from(const core::ChoiceQuestion& question, const CombinedScores& c,
                               std::vector<double> energies, std::size_t incidents) {
  core::EvalOutcome out;
  out.question_id = question.id;
  out.chosen_index = c.chosen;
  out.gold_index = question.gold_index;
  out.correct = c.chosen == question.gold_index;
  out.tie = c.tie;
  out.gamma = c.gamma;
  out.per_candidate_scores = c.modified;
  out.energies = std::move(energies);
  out.incidents = incidents;
  out.category = question.category;
  return out;
}

}  // namespace

core::EvalOutcome combined_outcome(const core::ChoiceQuestion& question, const neural::ScoreVector& scores,
                                   const symbolic::EnergyReport& report, double gamma) {
  return outcome_from(question, combine(scores.loglikes, report.energies, gamma), report.energies,
                      report.incidents.size());
}

core::EvalOutcome combined_predict(const neural::ScorerHandle& scorer, const symbolic::WeightedRuleSet& ruleset,
                                   const GammaPolicy& policy, const core::ChoiceQuestion& question) {
  const neural::ScoreVector scores = neural::score_candidates(scorer, question);
  const symbolic::EnergyReport report = symbolic::score_matrix(ruleset, question);
  return combined_outcome(question, scores, report, gamma_value(policy, scores.loglikes));
}

std::vector<core::EvalOutcome> combined_predict_batch(const neural::ScorerHandle& scorer,
                                                      const symbolic::WeightedRuleSet& ruleset,
                                                      const GammaPolicy& policy,
                                                      const std::vector<core::ChoiceQuestion>& questions,
                                                      std::size_t workers) {
  const std::vector<neural::ScoreVector> scores = neural::score_batch(scorer, questions, workers);
  const bool per_dataset = policy.kind == GammaKind::kMaxLogGap && policy.scope == GammaScope::kPerDataset;
  const double shared_gamma = per_dataset ? dataset_gamma(scores) : 0.0;
  std::vector<core::EvalOutcome> out(questions.size());
  core::parallel_for(questions.size(), workers, [&](std::size_t q) {
    const symbolic::EnergyReport report = symbolic::score_matrix(ruleset, questions[q]);
    const double gamma = per_dataset ? shared_gamma : gamma_value(policy, scores[q].loglikes);
    out[q] = combined_outcome(questions[q], scores[q], report, gamma);
  });
  return out;
}

double accuracy(const std::vector<core::EvalOutcome>& outcomes) {
  if (outcomes.empty()) return 0.0;
  const auto n = std::count_if(outcomes.begin(), outcomes.end(), [](const core::EvalOutcome& o) { return o.correct; });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

// ---------------------------------------------------------------------------
// EvaluationCache

EvaluationCache::EvaluationCache(std::vector<core::ChoiceQuestion> questions, std::vector<neural::ScoreVector> scores,
                                 GammaPolicy policy, dsl::EvalBudget budget, std::size_t workers)
    : questions_(std::move(questions)),
      scores_(std::move(scores)),
      policy_(policy),
      budget_(budget),
      workers_(workers) {
  if (scores_.size() != questions_.size()) throw ValidationError("evaluation cache: score count mismatch");
  const bool per_dataset = policy_.kind == GammaKind::kMaxLogGap && policy_.scope == GammaScope::kPerDataset;
  const double shared = per_dataset ? dataset_gamma(scores_) : 0.0;
  for (const auto& s : scores_) gammas_.push_back(per_dataset ? shared : gamma_value(policy_, s.loglikes));
}

EvaluationCache EvaluationCache::build(const neural::ScorerHandle& scorer, std::vector<core::ChoiceQuestion> questions,
                                       GammaPolicy policy, std::size_t workers) {
  std::vector<neural::ScoreVector> scores = neural::score_batch(scorer, questions, workers);
  return EvaluationCache(std::move(questions), std::move(scores), policy, {}, workers);
}

std::shared_ptr<const EvaluationCache::Column> EvaluationCache::column(const symbolic::WeightedRule& rule) {
  const std::string key = rule.source.source;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = columns_.find(key);
    if (it != columns_.end()) return it->second;
  }
  auto col = std::make_shared<Column>();
  col->scores.resize(questions_.size());
  col->incidents.assign(questions_.size(), 0);
  core::parallel_for(questions_.size(), workers_, [&](std::size_t q) {
    std::vector<symbolic::Incident> incidents;
    col->scores[q] = symbolic::rule_scores(rule, questions_[q], budget_, &incidents);
    col->incidents[q] = incidents.size();
  });
  std::lock_guard<std::mutex> lock(mu_);
  return columns_.emplace(key, std::move(col)).first->second;
}

std::shared_ptr<const EvaluationCache::Column> EvaluationCache::column(const dsl::RuleSource& source) {
  symbolic::WeightedRule rule{source, dsl::parse_rule(source), 1.0, {}};
  return column(rule);
}

std::vector<core::EvalOutcome> EvaluationCache::evaluate(const symbolic::WeightedRuleSet& ruleset) {
  std::vector<std::shared_ptr<const Column>> cols;
  for (const auto& r : ruleset.rules()) cols.push_back(column(r));
  return evaluate(cols, ruleset.weights());
}

std::vector<core::EvalOutcome> EvaluationCache::evaluate(const std::vector<std::shared_ptr<const Column>>& columns,
                                                         const std::vector<double>& weights) const {
  if (columns.size() != weights.size()) throw ValidationError("evaluation cache: weight count mismatch");
  std::vector<core::EvalOutcome> out(questions_.size());
  std::vector<double> row(columns.size());
  for (std::size_t q = 0; q < questions_.size(); ++q) {
    const std::size_t k = questions_[q].size();
    std::vector<double> energies(k);
    std::size_t incidents = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < columns.size(); ++j) row[j] = columns[j]->scores[q][i];
      energies[i] = symbolic::energy(row, weights);
    }
    for (const auto& c : columns) incidents += c->incidents[q];
    const CombinedScores combined = combine(scores_[q].loglikes, energies, gammas_[q]);
    out[q] = outcome_from(questions_[q], combined, std::move(energies), incidents);
  }
  return out;
}

std::size_t EvaluationCache::correct_count(const symbolic::WeightedRuleSet& ruleset) {
  const auto outcomes = evaluate(ruleset);
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const core::EvalOutcome& o) { return o.correct; }));
}

// ---------------------------------------------------------------------------
// Predictor configurations

std::string_view predictor_mode_name(PredictorMode mode) {
  switch (mode) {
    case PredictorMode::kNeural: return "neural";
    case PredictorMode::kSymbolic: return "symbolic";
    case PredictorMode::kCombined: return "combined";
  }
  return "?";
}

core::EvalOutcome predict_with(const PredictorConfig& config, const core::ChoiceQuestion& question) {
  static const symbolic::WeightedRuleSet kEmpty;
  const symbolic::WeightedRuleSet& rules = config.ruleset ? *config.ruleset : kEmpty;
  switch (config.mode) {
    case PredictorMode::kNeural:
      return neural::neural_outcome(question, neural::score_candidates(config.scorer, question));
    case PredictorMode::kSymbolic:
      return symbolic::symbolic_outcome(rules, question);
    case PredictorMode::kCombined:
      break;
  }
  return combined_predict(config.scorer, rules, config.policy, question);
}

RouteResult oracle_route(const std::vector<PredictorConfig>& configs, const core::ChoiceQuestion& question) {
  if (configs.empty()) throw ValidationError("oracle_route: no predictor configurations");
  RouteResult first;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    core::EvalOutcome o = predict_with(configs[c], question);
    if (o.correct) return {c, configs[c].id, std::move(o)};
    if (c == 0) first = {0, configs[0].id, std::move(o)};
  }
  return first;
}

}  // namespace rulefuse::synergy
