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

#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/symbolic/ruleset.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using symbolic::WeightedRuleSet;

namespace {

const char* kBuyNow = "when action == \"click[buy now]\" and not contains(belief, \"Buy Now\") score -1";

core::ChoiceQuestion shop_question() {
  core::ChoiceQuestion q;
  q.id = "shop";
  q.belief = core::render_belief("Buy a lamp.", {{"search lamp", "Results: lamp $10 [Add to cart]", 0}}, "plain");
  q.action = core::ActionText("click[buy now]");
  q.candidates = {{"Thank you for shopping", 1.0}, {"Nothing happens", 0.0}};
  q.gold_index = 1;
  return q;
}

}  // namespace

TEST_CASE("energies are weighted sums of rule scores") {
  const auto q = fixtures::question("q", "go", {"first", "second", "third"}, 0);
  CHECK(symbolic::score_matrix(WeightedRuleSet{}, q).energies == std::vector<double>{0, 0, 0});

  const auto one = WeightedRuleSet::make({{"r", "", "when contains(next_state, \"first\") score 1"}}, {1.0});
  CHECK(symbolic::score_matrix(one, q).energies == std::vector<double>{1, 0, 0});

  const auto two = WeightedRuleSet::make({{"neg", "", "when next_state == \"second\" score -1"},
                                          {"pos", "", "when next_state == \"second\" score 1"}},
                                         {1.0, 0.5});
  const auto report = symbolic::score_matrix(two, q);
  CHECK(report.energies[1] == -0.5);
  CHECK(report.scores[1] == std::vector<double>{-1, 1});
  CHECK(symbolic::energy({-1, 1}, {1, 0.5}) == -0.5);
}

TEST_CASE("symbolic prediction takes the first maximal energy") {
  const auto q = fixtures::question("q", "go", {"a", "b", "c"}, 0);
  CHECK(symbolic::symbolic_predict(WeightedRuleSet{}, q) == 0);
  const auto rules = WeightedRuleSet::make(
      {{"a", "", "when next_state == \"a\" score -1"}, {"bc", "", "when next_state != \"a\" score 0.2"}}, {1, 1});
  const auto out = symbolic::symbolic_outcome(rules, q);
  CHECK(out.chosen_index == 1);
  CHECK(out.tie);
  CHECK(out.energies == std::vector<double>{-1, 0.2, 0.2});
}

TEST_CASE("a purchase rule rejects the impossible success") {
  const auto q = shop_question();
  const auto rules = WeightedRuleSet::make({{"buy-now", "Buy Now missing means failure", kBuyNow}}, {1.0});
  const auto report = symbolic::score_matrix(rules, q);
  CHECK(report.scores[0][0] == -1.0);
  CHECK(report.scores[1][0] == -1.0);
  // The rule reads the next state too when told to.
  const auto sharper = WeightedRuleSet::make(
      {{"buy-now", "", std::string(kBuyNow).replace(std::string(kBuyNow).find("score"), 0,
                                                   "and contains(next_state, \"Thank you\") ")}},
      {1.0});
  CHECK(symbolic::symbolic_predict(sharper, q) == 1);
}

TEST_CASE("coverage counts only non-zero scores") {
  core::TransitionStep step;
  step.belief = core::render_belief("t", {}, "plain");
  step.action = core::ActionText("smelt glass");
  step.next_state = "smelted 1 glass";
  step.trajectory_id = "t";
  CHECK(symbolic::active_rule_count(WeightedRuleSet{}, step) == 0);
  const auto three = WeightedRuleSet::make({{"a", "", "when contains(action, \"smelt\") score 1"},
                                            {"b", "", "when contains(action, \"craft\") score 1"},
                                            {"c", "", "when contains(action, \"move\") score 1"}},
                                           {1, 1, 1});
  CHECK(symbolic::active_rule_count(three, step) == 1);
  const auto zero = WeightedRuleSet::make({{"z", "", "when true score 0"}}, {1});
  CHECK(symbolic::active_rule_count(zero, step) == 0);
}

TEST_CASE("rule sets are immutable values with versions") {
  const auto a = WeightedRuleSet::make({{"x", "", "when true score 1"}}, {1.0});
  const auto b = a.with_rule({"y", "", "when false score 1"}, 0.5);
  CHECK(a.size() == 1);
  CHECK(b.size() == 2);
  CHECK(b.version() == a.version() + 1);
  CHECK(b.without({0}).at(0).source.id == "y");
  CHECK(b.with_weights({2, 3}).weights() == std::vector<double>{2, 3});
  CHECK_THROWS_AS(b.with_weights({1}), ValidationError);
  CHECK_THROWS_AS(b.with_weights({-1, 1}), ValidationError);
  CHECK_THROWS_AS(a.with_rule({"x", "", "when true score 1"}, 1.0), ValidationError);
  CHECK_THROWS_WITH_AS(WeightedRuleSet::make({{"broken-id", "", "when score"}}, {1.0}),
                       doctest::Contains("broken-id"), ValidationError);
}

TEST_CASE("rule set files round-trip and name bad rules") {
  const auto dir = fixtures::tmp_dir("symbolic-io");
  const auto demo = bench::demo_ruleset().with_weights({1, 0.5, 2, 0.25, 1});
  REQUIRE(demo.size() == 5);
  symbolic::ruleset_save(dir / "r.json", demo);
  CHECK(symbolic::ruleset_load(dir / "r.json") == demo);

  auto doc = nlohmann::json::parse(symbolic::ruleset_to_json(demo));
  doc["rules"][2]["source"] = "when (";
  const std::string id = demo.at(2).source.id;
  CHECK_THROWS_WITH_AS(symbolic::ruleset_from_json(doc.dump()), doctest::Contains(id.c_str()), Error);
}

TEST_CASE("uniform positive weight scaling keeps every symbolic choice") {
  const auto questions = core::dataset_load(fixtures::toy_data() / "dev.jsonl");
  const auto demo = bench::demo_ruleset();
  core::Rng rng(5);
  std::vector<double> w;
  for (std::size_t j = 0; j < demo.size(); ++j) w.push_back(0.1 + rng.unit());
  const auto base = demo.with_weights(w);
  for (double c : {0.01, 0.5, 3.0, 100.0}) {
    std::vector<double> scaled;
    for (double x : w) scaled.push_back(c * x);
    const auto other = demo.with_weights(scaled);
    for (const auto& q : questions) CHECK(symbolic::symbolic_predict(base, q) == symbolic::symbolic_predict(other, q));
  }
}
