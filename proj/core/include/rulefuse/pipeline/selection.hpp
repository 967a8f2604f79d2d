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

// Rule-guided selection of training steps for updating the neural model.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rulefuse/core/types.hpp"
#include "rulefuse/symbolic/ruleset.hpp"

namespace rulefuse::pipeline {

// Steps are identified as "<trajectory_id>#<step_index>".
std::string step_id(const core::TransitionStep& step);

struct SelectionPlan {
  double budget_fraction = 0.5;
  std::uint64_t seed = 0;
  std::size_t total_steps = 0;
  // Per step, in trainset order.
  std::vector<std::string> step_ids;
  std::vector<std::size_t> k;
  std::vector<double> inclusion_probability;
  std::vector<bool> selected;
  // Steps no rule covers (k = 0); always selected.
  std::vector<std::string> mandatory;
  // Steps drawn from the covered remainder.
  std::vector<std::string> sampled;
  std::string warning;

  std::size_t selected_count() const;
  double selected_fraction() const;
};

// Keeps every step with k = 0, then draws the covered steps without
// replacement with inclusion probability min(1, c / k) so that the expected
// total is round(budget_fraction * N). The draw is systematic sampling over
// a seeded random permutation, so the realised count is exact and the plan
// depends only on the inputs and the seed. When the mandatory steps alone
// exceed the budget, only they are kept and `warning` is set.
SelectionPlan select_training_data(const std::vector<core::TransitionStep>& trainset,
                                   const symbolic::WeightedRuleSet& ruleset, double budget_fraction,
                                   std::uint64_t seed);

// Same, from precomputed k values (one per step).
SelectionPlan select_by_coverage(const std::vector<std::string>& ids, const std::vector<std::size_t>& k,
                                 double budget_fraction, std::uint64_t seed);

std::string plan_to_json(const SelectionPlan& plan);
SelectionPlan plan_from_json(std::string_view json);

// One JSON line per selected step: the transition-step record plus
// "input" (context shown to the model) and "target" {next_state, reward}.
// Returns the number of records written.
std::size_t export_sft_dataset(const SelectionPlan& plan, const std::vector<core::TransitionStep>& trainset,
                               const std::filesystem::path& path);

}  // namespace rulefuse::pipeline
