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

// Shared builders for the unit and acceptance tests.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rulefuse/core/random.hpp"
#include "rulefuse/core/types.hpp"
#include "rulefuse/induction/llm.hpp"
#include "rulefuse/neural/scorer.hpp"
#include "rulefuse/symbolic/ruleset.hpp"
#include "rulefuse/synergy/combine.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using namespace rulefuse;

// Fresh, empty directory under the build tree.
fs::path tmp_dir(const std::string& name);
fs::path source_dir();
fs::path toy_data();

// Question with the "plain" belief template and reward-0 candidates.
core::ChoiceQuestion question(const std::string& id, const std::string& action,
                              const std::vector<std::string>& next_states, std::size_t gold,
                              const std::string& category = "");

struct Planted {
  std::vector<core::ChoiceQuestion> questions;
  std::shared_ptr<neural::MockTable> table;
  neural::ScorerHandle scorer;

  // Adds a two-candidate question; the neural model gives the candidates
  // probabilities p0 and 1 - p0.
  void add(const std::string& id, const std::string& action, const std::string& first, const std::string& second,
           std::size_t gold, double p0, const std::string& category = "");
  synergy::EvaluationCache cache(const synergy::GammaPolicy& policy = synergy::GammaPolicy::fixed(1.0)) const;
};

Planted make_planted();

// Four groups of ten two-candidate questions. The neural model (0.6 / 0.4)
// misses every alpha, beta and delta question and gets every gamma one.
//   alpha / beta: the wrong candidate mentions "alpha-wrong" / "beta-wrong".
//   gamma: the gold candidate mentions "gamma-bad".
//   delta: nothing distinguishes the candidates.
Planted induction_fixture();

inline const char* kAlphaRule = "when contains(next_state, \"alpha-wrong\") score -1";
inline const char* kBetaRule = "when contains(next_state, \"beta-wrong\") score -1";
inline const char* kNeutralRule = "when contains(action, \"no-such-action\") score 1";
inline const char* kHarmfulRule = "when contains(next_state, \"gamma-bad\") score -1";

// Proposals in the order alpha, neutral, harmful, beta. Every reflection on
// the harmful rule returns another harmful variant. Later prompts get a
// reply without a program.
std::vector<induction::ScriptedLlmClient::Entry> induction_script();

// Twenty questions: ten the neural model misses that kHelpfulRule fixes and
// ten it answers correctly, five of which kNoisyRule breaks.
Planted noisy_fixture();
inline const char* kHelpfulRule = "when contains(next_state, \"alpha-wrong\") score -1";
inline const char* kNoisyRule = "when contains(next_state, \"noisy\") score -1";
symbolic::WeightedRuleSet noisy_ruleset(double helpful_weight = 1.0, double noisy_weight = 1.0);

// Accuracy with p_i * exp(gamma * E_i) computed in long double, directly
// from the rule scores. Independent of the cache and the combiner.
std::size_t brute_force_correct(const std::vector<core::ChoiceQuestion>& questions, const neural::ScorerHandle& scorer,
                                const symbolic::WeightedRuleSet& ruleset, double gamma);

// Random well-typed rule program; expressions nest at most `depth` levels.
std::string random_rule(core::Rng& rng, int depth = 5);
// Random evaluation context built from a small vocabulary.
struct OwnedContext {
  std::string belief, action, next_state;
  double reward = 0.0;
  dsl::RuleContext view() const { return {belief, action, next_state, reward}; }
};
OwnedContext random_context(core::Rng& rng);

}  // namespace fixtures
