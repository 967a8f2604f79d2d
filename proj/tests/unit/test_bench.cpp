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

#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/text.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using namespace rulefuse::bench;

namespace {

ToyEnvState state(std::map<std::string, int> inventory, std::string goal = "torch", std::set<std::string> stations = {}) {
  ToyEnvState s;
  s.inventory = std::move(inventory);
  s.goal = std::move(goal);
  s.stations = std::move(stations);
  return s;
}

StepResult step(const ToyEnvState& s, const std::string& action) {
  return env_step(default_env(), s, core::ActionText(action));
}

class Canned : public neural::Scorer {
 public:
  explicit Canned(std::vector<std::string> samples) : samples_(std::move(samples)) {}
  std::string kind() const override { return "canned"; }
  neural::RawScores score(const neural::ScoreRequest&) override { return {}; }
  std::vector<std::string> generate(const neural::GenerateRequest&) override { return samples_; }

 private:
  std::vector<std::string> samples_;
};

}  // namespace

TEST_CASE("recipes apply exactly") {
  const auto r = step(state({{"plank", 2}}), "craft stick");
  CHECK(r.legal);
  CHECK(r.state.inventory == std::map<std::string, int>{{"stick", 1}});
  CHECK(r.reward == 0.0);
  CHECK(r.category == "craft-legal");
  CHECK(r.observation.rfind("crafted 1 stick\ninventory: stick=1\n", 0) == 0);

  const auto goal = step(state({{"plank", 2}}, "stick"), "craft stick");
  CHECK(goal.reward == 1.0);
  CHECK(goal.category == "goal-step");
  CHECK(goal.state.goal_reached);
  const auto after = step(goal.state, "wait");
  CHECK(after.reward == 0.0);

  const auto missing = step(state({{"plank", 1}}), "craft stick");
  CHECK_FALSE(missing.legal);
  CHECK(missing.state == state({{"plank", 1}}));
  CHECK(missing.observation.rfind("missing: plank", 0) == 0);
  CHECK(missing.category == "craft-illegal");

  const auto cake = step(state({{"milk_bucket", 3}, {"sugar", 2}, {"egg", 1}, {"wheat", 3}}, "cake", {"crafting_table"}),
                         "craft cake");
  CHECK(cake.state.inventory == std::map<std::string, int>{{"bucket", 3}, {"cake", 1}});

  const auto smelt = step(state({{"iron_ore", 2}}, "torch", {"furnace"}), "smelt iron_ingot");
  CHECK(smelt.state.inventory == std::map<std::string, int>{{"iron_ingot", 1}, {"iron_ore", 1}});
  CHECK(smelt.category == "smelt");
  CHECK_FALSE(step(state({{"iron_ore", 2}}), "smelt iron_ingot").legal);

  const auto placed = step(state({{"crafting_table", 1}}), "move crafting_table");
  CHECK(placed.state.stations.count("crafting_table") == 1);
  CHECK(placed.state.count("crafting_table") == 0);
  CHECK_FALSE(step(state({}), "dance").legal);
}

TEST_CASE("observations parse back into states") {
  const auto s = state({{"log", 3}, {"plank", 4}}, "torch", {"furnace"});
  const auto parsed = parse_observation(render_observation(default_env(), s, "hello"));
  REQUIRE(parsed.has_value());
  CHECK(parsed->inventory == s.inventory);
  CHECK(parsed->stations == s.stations);
  CHECK_FALSE(parse_observation("nothing useful").has_value());
  CHECK(render_inventory({}) == "(empty)");
}

TEST_CASE("environment config validation and JSON") {
  const auto env = default_env();
  CHECK_NOTHROW(env.validate());
  CHECK(env_from_json(env_to_json(env)).recipes == env.recipes);
  auto bad = env;
  bad.recipes[0].output.count = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = env;
  bad.recipes.push_back(env.recipes[0]);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("trajectories replay and reach their goals") {
  const auto env = default_env();
  CHECK(generate_trajectories(env, Policy::kGoalDirected, 0, 1).empty());
  const auto goal_directed = generate_trajectories(env, Policy::kGoalDirected, 40, 3);
  REQUIRE(goal_directed.size() == 40);
  for (const auto& t : goal_directed) {
    REQUIRE_FALSE(t.steps.empty());
    CHECK(t.steps.back().reward == 1.0);
    for (const auto& s : t.steps)
      if (s.step_index < 8) CHECK(s.belief.history.front().action == "look");
  }
  const auto random = generate_trajectories(env, Policy::kRandom, 40, 3);
  CHECK(replay_mismatch(env, goal_directed).empty());
  CHECK(replay_mismatch(env, random).empty());
  CHECK_NOTHROW(core::validate_step_order(flatten(goal_directed)));
  CHECK(flatten(generate_trajectories(env, Policy::kRandom, 40, 3)) == flatten(random));

  auto tampered = goal_directed;
  tampered[0].steps[0].next_state += "x";
  CHECK(replay_mismatch(env, tampered) == tampered[0].id + "#0");
}

TEST_CASE("questions: the gold answer is the true transition") {
  const auto env = default_env();
  const auto trajs = generate_trajectories(env, Policy::kGoalDirected, 20, 5);
  neural::ScorerHandle weak{std::make_shared<ToyWeakModel>(env, 5)};
  QuestionOptions opts;
  opts.count = 60;
  opts.seed = 2;
  const auto qs = make_questions(trajs, weak, opts);
  CHECK(qs.size() == 60);
  for (const auto& q : qs) {
    CHECK(q.size() == 4);
    const auto before = parse_observation(q.belief.rendered);
    REQUIRE(before.has_value());
    auto s = *before;
    s.goal = trajs[0].initial.goal;  // goal only matters for the reward
    const auto truth = env_step(env, s, q.action);
    CHECK(q.candidates[q.gold_index].next_state == truth.observation);
  }
  CHECK(make_questions(trajs, weak, opts) == qs);
}

TEST_CASE("questions from a scripted generator") {
  const auto env = default_env();
  const auto trajs = generate_trajectories(env, Policy::kGoalDirected, 3, 9);
  const auto& first = trajs[0].steps[0];
  QuestionOptions opts;
  opts.count = 1;
  opts.distractors = 1;

  SUBCASE("one distractor gives two candidates") {
    neural::ScorerHandle gen{std::make_shared<Canned>(std::vector<std::string>{"made up\nreward: 0"})};
    const auto qs = make_questions(trajs, gen, opts);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].size() == 2);
    CHECK(qs[0].candidates[1 - qs[0].gold_index] == core::Candidate{"made up", 0.0});
  }
  SUBCASE("a generator echoing the truth is not a distractor") {
    std::vector<std::string> samples;
    for (const auto& t : trajs)
      for (const auto& s : t.steps) samples.push_back(s.next_state + "\nreward: " + text::format_number(s.reward));
    neural::ScorerHandle gen{std::make_shared<Canned>(samples)};
    opts.count = 5;
    for (const auto& q : make_questions(trajs, gen, opts)) {
      CHECK(q.size() == 2);
      CHECK(q.candidates[0] != q.candidates[1]);
    }
  }
  CHECK(first.trajectory_id == trajs[0].id);
}

TEST_CASE("the weak model is deterministic and the scorer calibrated") {
  const auto env = default_env();
  ToyWeakModel weak(env, 1);
  const auto trajs = generate_trajectories(env, Policy::kGoalDirected, 4, 1);
  const neural::GenerateRequest req{neural::scoring_context(trajs[0].steps[0].belief, trajs[0].steps[0].action), 5, {}};
  CHECK(weak.generate(req) == weak.generate(req));
  CHECK_THROWS_AS(weak.score({"c", {"a"}}), ValidationError);

  const auto dev = core::dataset_load(fixtures::toy_data() / "dev.jsonl");
  neural::ScorerHandle calibrated{std::make_shared<neural::MockTable>(calibrate_mock_scorer(dev))};
  std::size_t correct = 0;
  for (const auto& q : dev) correct += neural::neural_predict(calibrated, q) == q.gold_index ? 1 : 0;
  CHECK(correct == 120);
}

TEST_CASE("the shipped toy data is what the generator produces") {
  const auto dir = fixtures::tmp_dir("bench-regen");
  const BenchSpec spec;
  write_bench(dir, spec, generate_bench(spec));
  for (const char* name : {"env.json", "train_steps.jsonl", "dev.jsonl", "test.jsonl", "mock_scorer.json", "demo_rules.json"}) {
    INFO(name);
    CHECK(core::read_file(dir / name) == core::read_file(fixtures::toy_data() / name));
  }
}
