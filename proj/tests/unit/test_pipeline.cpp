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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rulefuse/core/text.hpp"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/pipeline/phases.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using namespace rulefuse::pipeline;

namespace {

const std::vector<core::TransitionStep>& trainset() {
  static const auto steps = core::steps_load(fixtures::toy_data() / "train_steps.jsonl");
  return steps;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("t#" + std::to_string(i));
  return out;
}

PhaseConfig phase_config(const fixtures::fs::path& run_dir = {}) {
  PhaseConfig c;
  c.prompts = induction::builtin_template("generic");
  c.induction.max_clusters = 4;
  c.run_dir = run_dir;
  c.settings = {{"fixture", "planted"}};
  return c;
}

}  // namespace

TEST_CASE("selection keeps every uncovered step") {
  const auto plan = select_training_data(trainset(), symbolic::WeightedRuleSet{}, 0.3, 1);
  CHECK(plan.selected_count() == trainset().size());
  CHECK(plan.mandatory.size() == trainset().size());
  CHECK_FALSE(plan.warning.empty());
}

TEST_CASE("selection sizes, probabilities and determinism") {
  core::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<std::size_t> k(n);
    for (auto& x : k) x = rng.below(5);
    const double budget = 0.05 + 0.95 * rng.unit();
    const auto plan = select_by_coverage(ids(n), k, budget, trial);
    const std::size_t mandatory = static_cast<std::size_t>(std::count(k.begin(), k.end(), 0));
    const std::size_t target = static_cast<std::size_t>(std::llround(budget * static_cast<double>(n)));
    CHECK(plan.mandatory.size() == mandatory);
    CHECK(plan.selected_count() == std::max(target, mandatory));
    CHECK(plan.warning.empty() == (mandatory <= target));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(plan.inclusion_probability[i] >= 0.0);
      CHECK(plan.inclusion_probability[i] <= 1.0);
      if (k[i] == 0) CHECK(plan.selected[i]);
      if (plan.inclusion_probability[i] == 0.0) CHECK_FALSE(plan.selected[i]);
      if (plan.inclusion_probability[i] == 1.0) CHECK(plan.selected[i]);
    }
    // Probabilities are monotone in 1/k.
    bool monotone = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (k[i] > 0 && k[j] > 0 && k[i] < k[j])
          monotone = monotone && plan.inclusion_probability[i] >= plan.inclusion_probability[j];
    CHECK(monotone);
    const auto again = select_by_coverage(ids(n), k, budget, trial);
    CHECK(again.selected == plan.selected);
  }
  CHECK_THROWS_AS(select_by_coverage(ids(3), {1, 1, 1}, 0.0, 0), ValidationError);
  CHECK_THROWS_AS(select_by_coverage(ids(3), {1, 1, 1}, 1.5, 0), ValidationError);
  CHECK_THROWS_AS(select_by_coverage(ids(3), {1, 1}, 0.5, 0), ValidationError);
}

TEST_CASE("a budget with room for no extra steps keeps only the uncovered ones") {
  const auto plan = select_by_coverage(ids(10), {0, 0, 0, 0, 0, 1, 1, 2, 2, 3}, 0.5, 4);
  CHECK(plan.selected_count() == plan.mandatory.size());
  CHECK(plan.sampled.empty());
  CHECK(plan.warning.empty());
}

TEST_CASE("k=1 steps are drawn twice as often as k=2 steps") {
  std::vector<std::size_t> k;
  for (std::size_t i = 0; i < 10000; ++i) k.push_back(1 + i % 2);
  double n1 = 0, n2 = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto plan = select_by_coverage(ids(k.size()), k, 0.3, seed);
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!plan.selected[i]) continue;
      (k[i] == 1 ? n1 : n2) += 1;
    }
  }
  const double total = n1 + n2;
  const double e1 = total * 2 / 3, e2 = total / 3;
  const double chi2 = (n1 - e1) * (n1 - e1) / e1 + (n2 - e2) * (n2 - e2) / e2;
  CHECK(chi2 < 6.635);
}

TEST_CASE("the toy trainset with the demo rules keeps about half") {
  const auto plan = select_training_data(trainset(), bench::demo_ruleset(), 0.5, 11);
  CHECK(plan.selected_fraction() >= 0.35);
  CHECK(plan.selected_fraction() <= 0.65);
}

TEST_CASE("plans and exports round-trip") {
  const auto dir = fixtures::tmp_dir("pipeline-export");
  const auto plan = select_training_data(trainset(), bench::demo_ruleset(), 0.5, 11);
  const auto back = plan_from_json(plan_to_json(plan));
  CHECK(back.selected == plan.selected);
  CHECK(back.k == plan.k);
  CHECK(back.inclusion_probability == plan.inclusion_probability);
  CHECK(back.mandatory == plan.mandatory);
  CHECK(plan_to_json(back) == plan_to_json(plan));

  const std::size_t n = export_sft_dataset(plan, trainset(), dir / "sft.jsonl");
  CHECK(n == plan.selected_count());
  const auto reloaded = core::steps_load(dir / "sft.jsonl");
  std::vector<core::TransitionStep> expected;
  for (std::size_t i = 0; i < trainset().size(); ++i)
    if (plan.selected[i]) expected.push_back(trainset()[i]);
  CHECK(reloaded == expected);

  const auto lines = text::split_lines(core::read_file(dir / "sft.jsonl"));
  const auto first = nlohmann::json::parse(lines.at(0));
  CHECK(first.at("target").contains("next_state"));
  CHECK(first.at("target").contains("reward"));
  CHECK(first.at("input") == neural::scoring_context(expected[0].belief, expected[0].action));

  auto other = trainset();
  other.pop_back();
  CHECK_THROWS_AS(export_sft_dataset(plan, other, dir / "x.jsonl"), ValidationError);
}

TEST_CASE("weight learning") {
  SUBCASE("a rule without effect keeps its weight") {
    auto p = fixtures::noisy_fixture();
    auto dev = p.cache();
    const auto rules = symbolic::WeightedRuleSet::make({{"idle", "", fixtures::kNeutralRule}}, {1.0});
    const auto r = learn_weights(rules, dev);
    CHECK(r.ruleset.weights() == std::vector<double>{1.0});
    CHECK(r.passes == 1);
    CHECK(r.ruleset.version() == rules.version() + 1);
  }
  SUBCASE("a noisy rule is switched off") {
    auto p = fixtures::noisy_fixture();
    auto dev = p.cache();
    const auto rules = symbolic::WeightedRuleSet::make({{"noisy", "", fixtures::kNoisyRule}}, {1.0});
    const auto r = learn_weights(rules, dev);
    CHECK(r.ruleset.weights() == std::vector<double>{0.0});
    CHECK(r.correct_after == r.correct_before + 5);
    CHECK(dev.correct_count(r.ruleset) == r.correct_after);
  }
  SUBCASE("two complementary rules reach the grid optimum") {
    auto p = fixtures::induction_fixture();
    auto dev = p.cache();
    auto make = [](double a, double b) {
      return symbolic::WeightedRuleSet::make({{"alpha", "", "when contains(next_state, \"alpha-wrong\") score -0.5"},
                                              {"beta", "", fixtures::kBetaRule}},
                                             {a, b});
    };
    const WeightGrid grid;
    const auto r = learn_weights(make(0.25, 0.25), dev, grid);
    std::size_t best = 0;
    for (double a : grid.values)
      for (double b : grid.values) best = std::max(best, fixtures::brute_force_correct(p.questions, p.scorer, make(a, b), 1.0));
    CHECK(r.correct_after == best);
    CHECK(fixtures::brute_force_correct(p.questions, p.scorer, r.ruleset, 1.0) == best);
    CHECK(r.correct_after >= dev.correct_count(make(1, 1)));
    CHECK(r.ruleset.weights() == std::vector<double>{1.0, 0.5});
  }
}

TEST_CASE("empty rule sets and bad grids are rejected") {
  auto p = fixtures::noisy_fixture();
  auto dev = p.cache();
  CHECK_THROWS_AS(learn_weights({}, dev), ValidationError);
  WeightGrid g;
  g.values = {};
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g.values = {-1, 0};
  CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("phase 1 on the planted fixture") {
  const auto dir = fixtures::tmp_dir("pipeline-phase1");
  auto p = fixtures::induction_fixture();
  induction::ScriptedLlmClient llm(fixtures::induction_script());
  const auto r = run_phase1(p.questions, p.scorer, llm, phase_config(dir));
  CHECK(r.induction.accepted == 2);
  std::size_t rejected = 0;
  for (const auto& a : r.induction.attempts) rejected += a.verdict == induction::Verdict::kRejected ? 1 : 0;
  CHECK(rejected == 1);
  CHECK(r.baseline.overall.correct == 10);
  CHECK(r.baseline.predictor == "neural");
  CHECK(r.report.overall.correct == 30);
  CHECK(r.report.categories.at("alpha").accuracy() == 1.0);
  CHECK(r.report.categories.at("delta").accuracy() == 0.0);
  CHECK(r.report.settings.at("fixture") == "planted");
  CHECK(fixtures::fs::exists(ruleset_path(dir, r.ruleset.version())));
  CHECK(symbolic::ruleset_load(ruleset_path(dir, r.ruleset.version())) == r.ruleset);
  CHECK(report_from_json(core::read_file(dir / "report.phase1.json")).overall.correct == 30);
  CHECK(fixtures::fs::exists(dir / "induction.phase1.json"));
}

TEST_CASE("phase 1 with nothing to fix asks nothing") {
  auto p = fixtures::make_planted();
  for (int i = 0; i < 5; ++i) p.add("q" + std::to_string(i), "go", "yes " + std::to_string(i), "no", 0, 0.9);
  induction::ScriptedLlmClient llm({});
  const auto r = run_phase1(p.questions, p.scorer, llm, phase_config());
  CHECK(r.ruleset.empty());
  CHECK(r.induction.attempts.empty());
  CHECK(llm.prompts().empty());
  CHECK(r.report.overall.accuracy() == 1.0);
}

TEST_CASE("phase 2 cleans a rule the updated model no longer needs") {
  // "fix" questions: the first model misses them and the rule fixes them.
  // "trap" questions: the gold candidate trips the rule; harmless while the
  // first model is confident, harmful once the updated model is less so.
  auto first = fixtures::make_planted();
  auto updated = fixtures::make_planted();
  for (int i = 0; i < 6; ++i) {
    const std::string n = std::to_string(i);
    first.add("fix-" + n, "act " + n, "alpha-wrong " + n, "fine " + n, 1, 0.6);
    updated.add("fix-" + n, "act " + n, "alpha-wrong " + n, "fine " + n, 1, 0.3);
    first.add("trap-" + n, "act " + n, "alpha-wrong yet right " + n, "other " + n, 0, 0.9);
    updated.add("trap-" + n, "act " + n, "alpha-wrong yet right " + n, "other " + n, 0, 0.6);
  }
  const auto rules = symbolic::WeightedRuleSet::make({{"phase1-c0", "", fixtures::kAlphaRule}}, {1.0});
  auto first_cache = first.cache();
  CHECK(first_cache.correct_count(rules) == 12);

  const auto dir = fixtures::tmp_dir("pipeline-phase2");
  const std::vector<core::TransitionStep> train(trainset().begin(), trainset().begin() + 40);
  induction::ScriptedLlmClient llm({{"", "", "nothing to add", true}});
  const auto r = run_phase2(train, updated.questions, rules, updated.scorer, llm, phase_config(dir));
  CHECK(r.removed == std::vector<std::string>{"phase1-c0"});
  CHECK(r.ruleset.empty());
  CHECK(r.report.overall.correct == 12);
  REQUIRE(r.report.data_fraction.has_value());
  CHECK(*r.report.data_fraction == r.plan.selected_fraction());
  CHECK(fixtures::fs::exists(dir / "selection_plan.json"));
  CHECK(fixtures::fs::exists(dir / "sft_export.jsonl"));
  CHECK(fixtures::fs::exists(dir / "report.phase2.json"));
}

TEST_CASE("reports") {
  auto p = fixtures::make_planted();
  for (int i = 0; i < 10; ++i) {
    const std::string n = std::to_string(i);
    p.add("q" + n, "go", "a" + n, "b" + n, i < 7 ? 0 : 1, 0.8, i % 2 ? "odd" : "even");
  }
  auto empty = std::make_shared<const symbolic::WeightedRuleSet>();
  const synergy::PredictorConfig neural{"n", synergy::PredictorMode::kNeural, p.scorer, empty, {}};
  const auto r = evaluate(p.questions, neural);
  CHECK(r.overall.accuracy() == doctest::Approx(0.7));
  CHECK(r.overall.total == 10);
  CHECK(r.categories.at("odd").correct + r.categories.at("even").correct == 7);

  auto all = predict_dataset(neural, p.questions, 3);
  for (auto& o : all) o.correct = true;
  const auto perfect = summarize(all, "x");
  for (const auto& [name, stats] : perfect.categories) CHECK(stats.accuracy() == 1.0);

  auto with_extras = r;
  with_extras.data_fraction = 0.45;
  with_extras.notes = {"n1"};
  with_extras.settings = {{"k", "v"}};
  const auto back = report_from_json(report_to_json(with_extras));
  CHECK(report_to_json(back) == report_to_json(with_extras));

  const std::string table = render_report_table({r, perfect});
  CHECK(table.find("average") != std::string::npos);
  CHECK(table.find("0.700 (7/10)") != std::string::npos);
  const std::string lines = outcomes_to_jsonl(all);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 10);

  std::vector<core::EvalOutcome> unlabeled(1);
  unlabeled[0].question_id = "u";
  CHECK(summarize(unlabeled).categories.count("uncategorized") == 1);
}
