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

// Phase 1 (build a rule set for a fixed neural model) and Phase 2 (select
// data for the neural model, then clean, extend and reweight the rules).
//
// A run directory holds:
//   ruleset.v{N}.json, selection_plan.json, sft_export.jsonl,
//   report.{phase}.json, induction.{phase}.json, transcripts/

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rulefuse/induction/induce.hpp"
#include "rulefuse/pipeline/report.hpp"
#include "rulefuse/pipeline/selection.hpp"
#include "rulefuse/pipeline/weights.hpp"

namespace rulefuse::pipeline {

struct PhaseConfig {
  synergy::GammaPolicy policy;
  induction::InductionOptions induction;
  induction::PromptTemplate prompts;
  WeightGrid grid;
  double budget_fraction = 0.5;
  std::uint64_t selection_seed = 0;
  std::size_t workers = 1;
  // Artifacts are written here when non-empty.
  std::filesystem::path run_dir;
  // Recorded verbatim in reports.
  std::map<std::string, std::string> settings;
};

std::filesystem::path ruleset_path(const std::filesystem::path& run_dir, std::uint64_t version);

struct Phase1Result {
  symbolic::WeightedRuleSet ruleset;
  RunReport baseline;
  RunReport report;
  induction::InductionResult induction;
  LearnResult weights;
};

Phase1Result run_phase1(const std::vector<core::ChoiceQuestion>& devset, const neural::ScorerHandle& scorer,
                        induction::LlmClient& llm, const PhaseConfig& config);

struct Phase2Selection {
  SelectionPlan plan;
  std::size_t exported = 0;
};

// First half of Phase 2: coverage counts, selection plan and SFT export.
Phase2Selection phase2_select(const std::vector<core::TransitionStep>& trainset,
                              const symbolic::WeightedRuleSet& ruleset, const PhaseConfig& config);

struct Phase2Result {
  symbolic::WeightedRuleSet ruleset;
  SelectionPlan plan;
  RunReport report;
  std::vector<std::string> removed;
  induction::InductionResult induction;
  LearnResult weights;
};

// Second half, with the neural model updated on the exported data: clean,
// induce further rules, learn weights.
Phase2Result phase2_refine(const std::vector<core::ChoiceQuestion>& devset, const symbolic::WeightedRuleSet& ruleset,
                           const SelectionPlan& plan, const neural::ScorerHandle& updated_scorer,
                           induction::LlmClient& llm, const PhaseConfig& config);

Phase2Result run_phase2(const std::vector<core::TransitionStep>& trainset,
                        const std::vector<core::ChoiceQuestion>& devset, const symbolic::WeightedRuleSet& ruleset,
                        const neural::ScorerHandle& updated_scorer, induction::LlmClient& llm,
                        const PhaseConfig& config);

// JSON log of an induction round (clusters and attempts) for run directories.
std::string induction_to_json(const induction::InductionResult& result);

}  // namespace rulefuse::pipeline
