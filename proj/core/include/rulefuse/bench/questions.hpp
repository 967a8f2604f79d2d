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

// Benchmark questions for the toy environment: distractors from a weak
// generator, a calibrated mock scorer and a demonstration rule set.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rulefuse/bench/env.hpp"
#include "rulefuse/neural/scorer.hpp"
#include "rulefuse/symbolic/ruleset.hpp"

namespace rulefuse::bench {

// Generator that predicts the toy dynamics with typical mistakes: crafting
// despite a missing input, counts off by one, a forgotten side product,
// inputs left unconsumed, the wrong output item or the wrong reward. Samples
// depend only on the request and the seed.
class ToyWeakModel : public neural::Scorer {
 public:
  ToyWeakModel(EnvConfig config, std::uint64_t seed, double accuracy = 0.2);

  std::string kind() const override { return "toy-weak"; }
  neural::RawScores score(const neural::ScoreRequest& request) override;
  std::vector<std::string> generate(const neural::GenerateRequest& request) override;

 private:
  EnvConfig config_;
  std::uint64_t seed_;
  double accuracy_;
};

struct QuestionOptions {
  std::size_t count = 500;
  std::size_t distractors = 3;
  std::uint64_t seed = 0;
  // 0 means unlimited.
  std::size_t max_per_trajectory = 0;
  std::size_t max_per_category = 0;
  std::string id_prefix = "q";
};

// Samples steps (seeded, subject to the quotas) and builds one question per
// step: the true transition plus distractors from the generator that differ
// from it, filled up with perturbations of the true state when the
// generator runs short. The gold position is drawn from the seed.
std::vector<core::ChoiceQuestion> make_questions(const std::vector<Trajectory>& trajectories,
                                                 const neural::ScorerHandle& weak, const QuestionOptions& options);

// Perturbed versions of `gold` (count off by one, wrong item, unchanged
// state, flipped reward), in a fixed order.
std::vector<core::Candidate> perturbations(const core::Candidate& gold, const core::ChoiceQuestion& question);

std::vector<dsl::RuleSource> demo_rule_sources();
symbolic::WeightedRuleSet demo_ruleset();

// Categories the demonstration rules speak to.
bool demo_covered(const std::string& category);

struct CalibrationOptions {
  double target_accuracy = 0.6;
  std::uint64_t seed = 0;
  // Log-likelihood of the candidate the scorer prefers.
  double favored_loglike = -0.6931471805599453;
};

// Mock scorer over `questions` that answers round(target * N) of them
// correctly. The misses are drawn from the categories in demo_covered() and
// the scorer then prefers the first distractor (the generator's top wrong
// sample) with gold as the runner-up. The remaining candidates share the
// leftover mass with small distinct offsets so no ties occur.
neural::MockTable calibrate_mock_scorer(const std::vector<core::ChoiceQuestion>& questions,
                                        const CalibrationOptions& options = {});

struct BenchSpec {
  EnvConfig env = default_env();
  std::uint64_t seed = 7;
  std::size_t train_goal_directed = 120;
  std::size_t train_random = 40;
  std::size_t dev_questions = 200;
  std::size_t test_questions = 500;
  std::size_t distractors = 3;
  double target_accuracy = 0.6;
};

struct BenchFiles {
  std::vector<core::TransitionStep> train;
  std::vector<core::ChoiceQuestion> dev;
  std::vector<core::ChoiceQuestion> test;
  neural::MockTable scorer;
};

// Train, dev and test come from disjoint trajectory sets drawn from
// independent seed streams.
BenchFiles generate_bench(const BenchSpec& spec);

// env.json, train_steps.jsonl, dev.jsonl, test.jsonl, mock_scorer.json and
// demo_rules.json.
void write_bench(const std::filesystem::path& dir, const BenchSpec& spec, const BenchFiles& files);

}  // namespace rulefuse::bench
