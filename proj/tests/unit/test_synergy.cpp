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

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/synergy/combine.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using synergy::GammaPolicy;

namespace {

struct Toy {
  std::vector<core::ChoiceQuestion> dev = core::dataset_load(fixtures::toy_data() / "dev.jsonl");
  neural::ScorerHandle scorer{std::make_shared<neural::MockTable>(
      neural::MockTable::load(fixtures::toy_data() / "mock_scorer.json"))};
};

const Toy& toy() {
  static const Toy t;
  return t;
}

std::vector<std::size_t> choices(const std::vector<core::EvalOutcome>& outcomes) {
  std::vector<std::size_t> out;
  for (const auto& o : outcomes) out.push_back(o.chosen_index);
  return out;
}

}  // namespace

TEST_CASE("gamma policies") {
  CHECK(synergy::gamma_value(GammaPolicy::fixed(1.0), {-9, 4}) == 1.0);
  CHECK(synergy::gamma_value(GammaPolicy::max_log_gap(), {-3, 0, -1}) == 3.0);
  CHECK(synergy::gamma_value(GammaPolicy::max_log_gap(), {5}) == 0.0);
  CHECK(synergy::dataset_gamma({{{0, -2}, {}}, {{-1, -5}, {}}}) == 3.0);

  CHECK(synergy::parse_gamma("max-log-gap").kind == synergy::GammaKind::kMaxLogGap);
  CHECK(synergy::parse_gamma("max-log-gap", "dataset").scope == synergy::GammaScope::kPerDataset);
  CHECK(synergy::parse_gamma("fixed").fixed_value == 1.0);
  CHECK(synergy::parse_gamma("fixed=0.25").fixed_value == 0.25);
  CHECK(synergy::parse_gamma("2").fixed_value == 2.0);
  CHECK_THROWS_AS(synergy::parse_gamma("inf"), ValidationError);
  CHECK_THROWS_AS(synergy::parse_gamma("fixed=nan"), ValidationError);
  CHECK_THROWS_AS(synergy::parse_gamma("sometimes"), ValidationError);
  CHECK_THROWS_AS(synergy::parse_gamma("1", "galaxy"), ValidationError);
}

TEST_CASE("combine in the log domain") {
  CHECK(synergy::combine({std::log(0.7), std::log(0.3)}, {-1, 0}, 1.0).chosen == 1);
  CHECK(synergy::combine({std::log(0.7), std::log(0.3)}, {-1, 0}, 0.0).chosen == 0);
  CHECK(synergy::combine({-1, 3, 0}, {0.5, 0.5, 0.5}, 7.0).chosen == 1);
  const auto tie = synergy::combine({0, 0}, {0, 0}, 1.0);
  CHECK(tie.chosen == 0);
  CHECK(tie.tie);
  // Far below double underflow in the probability domain.
  CHECK(synergy::combine({-2000, -2001}, {-1, 1}, 1.0).chosen == 1);
  CHECK_THROWS_AS(synergy::combine({0, 0}, {0}, 1.0), ValidationError);
  CHECK_THROWS_AS(synergy::combine({0, std::nan("")}, {0, 0}, 1.0), ValidationError);
  CHECK_THROWS_AS(synergy::combine({0, 0}, {0, 0}, std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("equal energies and zero gamma reduce to the neural choice") {
  core::Rng rng(1);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 2 + rng.below(5);
    std::vector<double> l(k), e(k), flat(k, rng.unit() * 2 - 1);
    for (auto& x : l) x = -10 * rng.unit();
    for (auto& x : e) x = 2 * rng.unit() - 1;
    const std::size_t neural = core::argmax(l).index;
    CHECK(synergy::combine(l, e, 0.0).chosen == neural);
    CHECK(synergy::combine(l, flat, 3.0 * rng.unit()).chosen == neural);
  }
}

TEST_CASE("a rule overturns a confident mistake") {
  auto p = fixtures::make_planted();
  p.add("q", "press", "door stays shut", "door opens", 1, 0.6);
  const auto rules =
      symbolic::WeightedRuleSet::make({{"shut", "", "when contains(next_state, \"shut\") score -1"}}, {1.0});
  const auto& q = p.questions[0];
  CHECK(neural::neural_predict(p.scorer, q) == 0);
  const auto out = synergy::combined_predict(p.scorer, rules, GammaPolicy::fixed(1.0), q);
  CHECK(out.chosen_index == 1);
  CHECK(out.correct);
  CHECK(out.gamma == 1.0);
  CHECK(out.energies == std::vector<double>{-1, 0});
  CHECK(synergy::combined_predict(p.scorer, symbolic::WeightedRuleSet{}, GammaPolicy::fixed(1.0), q).chosen_index == 0);

  auto flat = fixtures::make_planted();
  flat.add("f", "press", "door stays shut", "door opens", 1, 0.5);
  const auto gap = synergy::combined_predict(flat.scorer, rules, GammaPolicy::max_log_gap(), flat.questions[0]);
  CHECK(gap.gamma == 0.0);
  CHECK(gap.chosen_index == 0);
}

TEST_CASE("empty rule set matches the neural predictor on the toy dev set") {
  const auto& t = toy();
  const auto combined =
      synergy::combined_predict_batch(t.scorer, symbolic::WeightedRuleSet{}, GammaPolicy::fixed(1.0), t.dev);
  for (std::size_t i = 0; i < t.dev.size(); ++i) CHECK(combined[i].chosen_index == neural::neural_predict(t.scorer, t.dev[i]));
}

TEST_CASE("joint rescaling of gamma and weights keeps every combined choice") {
  const auto& t = toy();
  const auto demo = bench::demo_ruleset();
  const auto base = synergy::combined_predict_batch(t.scorer, demo, GammaPolicy::fixed(1.0), t.dev);
  for (double c : {0.25, 2.0, 8.0}) {
    std::vector<double> w(demo.size(), c);
    const auto scaled = synergy::combined_predict_batch(t.scorer, demo.with_weights(w), GammaPolicy::fixed(1.0 / c), t.dev);
    CHECK(choices(scaled) == choices(base));
  }
}

TEST_CASE("the evaluation cache agrees with direct prediction") {
  const auto& t = toy();
  const auto demo = bench::demo_ruleset();
  for (const auto& policy : {GammaPolicy::fixed(1.0), GammaPolicy::max_log_gap(),
                             GammaPolicy::max_log_gap(synergy::GammaScope::kPerDataset)}) {
    auto cache = synergy::EvaluationCache::build(t.scorer, t.dev, policy, 3);
    for (const auto& rules : {symbolic::WeightedRuleSet{}, demo, demo.with_weights({0, 2, 0.5, 1, 0.25})}) {
      const auto direct = synergy::combined_predict_batch(t.scorer, rules, policy, t.dev, 1);
      const auto threaded = synergy::combined_predict_batch(t.scorer, rules, policy, t.dev, 4);
      const auto cached = cache.evaluate(rules);
      CHECK(cached == direct);
      CHECK(threaded == direct);
    }
  }
}

TEST_CASE("oracle routing picks the first correct config") {
  auto p = fixtures::make_planted();
  p.add("q", "press", "door stays shut", "door opens", 1, 0.6);
  const auto& q = p.questions[0];
  auto empty = std::make_shared<const symbolic::WeightedRuleSet>();
  auto fix = std::make_shared<const symbolic::WeightedRuleSet>(
      symbolic::WeightedRuleSet::make({{"shut", "", "when contains(next_state, \"shut\") score -1"}}, {1.0}));
  auto wrong = std::make_shared<const symbolic::WeightedRuleSet>(
      symbolic::WeightedRuleSet::make({{"opens", "", "when contains(next_state, \"opens\") score -1"}}, {1.0}));
  using M = synergy::PredictorMode;
  const synergy::PredictorConfig neural{"neural", M::kNeural, p.scorer, empty, GammaPolicy::fixed(1.0)};
  const synergy::PredictorConfig bad{"bad", M::kCombined, p.scorer, wrong, GammaPolicy::fixed(1.0)};
  const synergy::PredictorConfig good{"good", M::kCombined, p.scorer, fix, GammaPolicy::fixed(1.0)};
  const synergy::PredictorConfig good2{"good2", M::kSymbolic, p.scorer, fix, GammaPolicy::fixed(1.0)};

  CHECK(synergy::oracle_route({neural, good, bad}, q).config_id == "good");
  const auto none = synergy::oracle_route({neural, bad}, q);
  CHECK(none.config_index == 0);
  CHECK_FALSE(none.outcome.correct);
  CHECK(synergy::oracle_route({good2, good}, q).config_id == "good2");
  CHECK_THROWS_AS(synergy::oracle_route({}, q), ValidationError);
}
