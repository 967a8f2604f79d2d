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

#include "rulefuse/pipeline/phases.hpp"

#include "json.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"

namespace rulefuse::pipeline {

using nlohmann::json;

std::filesystem::path ruleset_path(const std::filesystem::path& run_dir, std::uint64_t version) {
  return run_dir / ("ruleset.v" + std::to_string(version) + ".json");
}

namespace {

void save_ruleset(const PhaseConfig& config, const symbolic::WeightedRuleSet& ruleset) {
  if (config.run_dir.empty()) return;
  std::filesystem::create_directories(config.run_dir);
  symbolic::ruleset_save(ruleset_path(config.run_dir, ruleset.version()), ruleset);
}

void save_text(const PhaseConfig& config, const std::string& name, const std::string& text) {
  if (config.run_dir.empty()) return;
  std::filesystem::create_directories(config.run_dir);
  core::write_file(config.run_dir / name, text);
}

RunReport dev_report(synergy::EvaluationCache& cache, const symbolic::WeightedRuleSet& ruleset,
                     const neural::ScorerHandle& scorer, const PhaseConfig& config, const std::string& phase) {
  RunReport r = summarize(cache.evaluate(ruleset), phase);
  r.predictor = ruleset.empty() ? "neural" : "combined";
  r.ruleset_version = ruleset.version();
  r.rule_count = ruleset.size();
  r.gamma = config.policy.describe();
  r.normalization = std::string(neural::normalization_name(scorer.normalization));
  r.settings = config.settings;
  return r;
}

LearnResult learn_or_keep(const symbolic::WeightedRuleSet& ruleset, synergy::EvaluationCache& cache,
                          const WeightGrid& grid) {
  if (!ruleset.empty()) return learn_weights(ruleset, cache, grid);
  LearnResult kept;
  kept.ruleset = ruleset;
  kept.correct_before = kept.correct_after = cache.correct_count(ruleset);
  return kept;
}

}  // namespace

Phase1Result run_phase1(const std::vector<core::ChoiceQuestion>& devset, const neural::ScorerHandle& scorer,
                        induction::LlmClient& llm, const PhaseConfig& config) {
  auto cache = synergy::EvaluationCache::build(scorer, devset, config.policy, config.workers);
  Phase1Result out;
  const symbolic::WeightedRuleSet empty;
  out.baseline = dev_report(cache, empty, scorer, config, "phase1-baseline");

  auto options = config.induction;
  options.phase = "phase1";
  out.induction = induction::induce_rules(empty, cache, llm, config.prompts, options);
  out.weights = learn_or_keep(out.induction.ruleset, cache, config.grid);
  out.ruleset = out.weights.ruleset;

  out.report = dev_report(cache, out.ruleset, scorer, config, "phase1");
  out.report.incidents += out.induction.incidents.size();
  out.report.notes.push_back("rules accepted: " + std::to_string(out.induction.accepted));
  out.report.notes.push_back("weights and rule acceptance use the same development set");

  save_ruleset(config, out.ruleset);
  save_text(config, "induction.phase1.json", induction_to_json(out.induction));
  save_text(config, "report.phase1.json", report_to_json(out.report));
  return out;
}

Phase2Selection phase2_select(const std::vector<core::TransitionStep>& trainset,
                              const symbolic::WeightedRuleSet& ruleset, const PhaseConfig& config) {
  core::validate_step_order(trainset);
  Phase2Selection out;
  out.plan = select_training_data(trainset, ruleset, config.budget_fraction, config.selection_seed);
  if (!config.run_dir.empty()) {
    save_text(config, "selection_plan.json", plan_to_json(out.plan));
    out.exported = export_sft_dataset(out.plan, trainset, config.run_dir / "sft_export.jsonl");
  } else {
    out.exported = out.plan.selected_count();
  }
  return out;
}

Phase2Result phase2_refine(const std::vector<core::ChoiceQuestion>& devset, const symbolic::WeightedRuleSet& ruleset,
                           const SelectionPlan& plan, const neural::ScorerHandle& updated_scorer,
                           induction::LlmClient& llm, const PhaseConfig& config) {
  auto cache = synergy::EvaluationCache::build(updated_scorer, devset, config.policy, config.workers);
  Phase2Result out;
  out.plan = plan;

  auto cleaned = induction::clean_rules(ruleset, cache);
  out.removed = cleaned.removed;
  save_ruleset(config, cleaned.ruleset);

  auto options = config.induction;
  options.phase = "phase2";
  out.induction = induction::induce_rules(cleaned.ruleset, cache, llm, config.prompts, options);
  out.weights = learn_or_keep(out.induction.ruleset, cache, config.grid);
  out.ruleset = out.weights.ruleset;

  out.report = dev_report(cache, out.ruleset, updated_scorer, config, "phase2");
  out.report.incidents += out.induction.incidents.size();
  out.report.data_fraction = plan.selected_fraction();
  out.report.notes.push_back("rules removed by cleaning: " + std::to_string(out.removed.size()));
  out.report.notes.push_back("rules accepted: " + std::to_string(out.induction.accepted));
  out.report.notes.push_back("cleaning, weights and rule acceptance use the same development set");
  if (!plan.warning.empty()) out.report.notes.push_back("selection: " + plan.warning);

  save_ruleset(config, out.ruleset);
  save_text(config, "induction.phase2.json", induction_to_json(out.induction));
  save_text(config, "report.phase2.json", report_to_json(out.report));
  return out;
}

Phase2Result run_phase2(const std::vector<core::TransitionStep>& trainset,
                        const std::vector<core::ChoiceQuestion>& devset, const symbolic::WeightedRuleSet& ruleset,
                        const neural::ScorerHandle& updated_scorer, induction::LlmClient& llm,
                        const PhaseConfig& config) {
  const auto selection = phase2_select(trainset, ruleset, config);
  return phase2_refine(devset, ruleset, selection.plan, updated_scorer, llm, config);
}

std::string induction_to_json(const induction::InductionResult& result) {
  json clusters = json::array();
  for (const auto& c : result.clusters) {
    clusters.push_back({{"id", c.id},
                        {"field", std::string(induction::case_field_name(c.field))},
                        {"members", c.members},
                        {"medoid", c.medoid}});
  }
  json attempts = json::array();
  for (const auto& a : result.attempts) {
    attempts.push_back({{"cluster_id", a.cluster_id},
                        {"field", std::string(induction::case_field_name(a.field))},
                        {"cluster_size", a.cluster_size},
                        {"reflection_round", a.reflection_round},
                        {"verdict", std::string(induction::verdict_name(a.verdict))},
                        {"description", a.description},
                        {"source", a.source},
                        {"diagnostics", a.diagnostics},
                        {"correct_before", a.verify.correct_before},
                        {"correct_after", a.verify.correct_after},
                        {"fixed", a.verify.fixed},
                        {"broken", a.verify.broken}});
  }
  json j = {{"errors", result.errors.size()},
            {"accepted", result.accepted},
            {"ruleset_version", result.ruleset.version()},
            {"clusters", clusters},
            {"attempts", attempts},
            {"incidents", result.incidents}};
  return j.dump(2) + "\n";
}

}  // namespace rulefuse::pipeline
