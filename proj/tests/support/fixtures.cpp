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

#include "support/fixtures.hpp"

#include <cmath>
#include <initializer_list>

#include "rulefuse/core/belief.hpp"
#include "rulefuse/core/text.hpp"

namespace fixtures {

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(RULEFUSE_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path source_dir() { return RULEFUSE_SOURCE_DIR; }
fs::path toy_data() { return source_dir() / "data" / "toy"; }

core::ChoiceQuestion question(const std::string& id, const std::string& action,
                              const std::vector<std::string>& next_states, std::size_t gold,
                              const std::string& category) {
  core::ChoiceQuestion q;
  q.id = id;
  q.belief = core::render_belief("Reach the " + id + " state.", {{"look", "start of " + id, 0.0}}, "plain");
  q.action = core::ActionText(action);
  for (const auto& s : next_states) q.candidates.push_back({s, 0.0});
  q.gold_index = gold;
  q.category = category;
  core::validate_question(q);
  return q;
}

void Planted::add(const std::string& id, const std::string& action, const std::string& first,
                  const std::string& second, std::size_t gold, double p0, const std::string& category) {
  questions.push_back(question(id, action, {first, second}, gold, category));
  table->set(neural::score_request(questions.back()), {{std::log(p0), std::log(1.0 - p0)}, {}});
}

synergy::EvaluationCache Planted::cache(const synergy::GammaPolicy& policy) const {
  return synergy::EvaluationCache::build(scorer, questions, policy);
}

Planted make_planted() {
  Planted p;
  p.table = std::make_shared<neural::MockTable>(0.0);
  p.scorer.scorer = p.table;
  return p;
}

Planted induction_fixture() {
  Planted p = make_planted();
  const char* verbs[] = {"open", "push", "pull", "lift", "turn", "read", "move", "shake", "close", "drop"};
  for (int i = 0; i < 10; ++i) {
    const std::string n = std::to_string(i);
    const std::string v = verbs[i];
    p.add("alpha-" + n, v + " the red lever " + n, "the door stays shut alpha-wrong " + n,
          "the door opens alpha-right " + n, 1, 0.6, "alpha");
    p.add("beta-" + n, v + " the blue switch " + n, "the light stays off beta-wrong " + n,
          "the light turns on beta-right " + n, 1, 0.6, "beta");
    p.add("gamma-" + n, v + " the green panel " + n, "the panel hums gamma-bad " + n, "the panel is silent " + n, 0,
          0.6, "gamma");
    p.add("delta-" + n, "wait quietly " + n, "a bird sings delta " + n, "a dog barks delta " + n, 1, 0.6, "delta");
  }
  return p;
}

namespace {

std::string reply(const std::string& description, const std::string& source) {
  return "### Rule ###\n" + description + "\n### Program ###\n" + source + "\n";
}

}  // namespace

std::vector<induction::ScriptedLlmClient::Entry> induction_script() {
  std::vector<induction::ScriptedLlmClient::Entry> e;
  for (int r = 0; r < 3; ++r)
    e.push_back({"", "gamma-bad", reply("Revised panel rule " + std::to_string(r + 1) + ".",
                                        "when contains(next_state, \"gamma-bad\") and length(action) > " +
                                            std::to_string(r) + " score -1"),
                 false});
  e.push_back({"", "", reply("A door that stays shut is wrong.", kAlphaRule), false});
  e.push_back({"", "", reply("Never fires.", kNeutralRule), false});
  e.push_back({"", "", reply("Humming panels are wrong.", kHarmfulRule), false});
  e.push_back({"", "", reply("A light that stays off is wrong.", kBetaRule), false});
  e.push_back({"", "", "I have no further rule.", true});
  return e;
}

Planted noisy_fixture() {
  Planted p = make_planted();
  for (int i = 0; i < 10; ++i) {
    const std::string n = std::to_string(i);
    p.add("fix-" + n, "press button " + n, "nothing happens alpha-wrong " + n, "a bell rings " + n, 1, 0.6, "fix");
    const bool noisy = i < 5;
    p.add("keep-" + n, "press knob " + n, std::string(noisy ? "noisy " : "") + "a chime sounds " + n,
          "silence " + n, 0, 0.6, noisy ? "noisy" : "clean");
  }
  return p;
}

symbolic::WeightedRuleSet noisy_ruleset(double helpful_weight, double noisy_weight) {
  return symbolic::WeightedRuleSet::make({{"helpful", "Penalises silent buttons.", kHelpfulRule},
                                          {"noisy", "Penalises any chime.", kNoisyRule}},
                                         {helpful_weight, noisy_weight});
}

std::size_t brute_force_correct(const std::vector<core::ChoiceQuestion>& questions,
                                const neural::ScorerHandle& scorer, const symbolic::WeightedRuleSet& ruleset,
                                double gamma) {
  std::size_t correct = 0;
  for (const auto& q : questions) {
    const auto raw = scorer.scorer->score(neural::score_request(q));
    long double best = -1;
    std::size_t chosen = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      long double e = 0;
      for (const auto& rule : ruleset.rules()) {
        const auto r = dsl::eval_rule(rule.ast, symbolic::rule_context(q, i));
        e += static_cast<long double>(rule.weight) * r.score;
      }
      const long double v = std::exp(static_cast<long double>(raw.loglikes[i])) * std::exp(gamma * e);
      if (v > best) {
        best = v;
        chosen = i;
      }
    }
    correct += chosen == q.gold_index ? 1 : 0;
  }
  return correct;
}

namespace {

class ProgramGen {
 public:
  explicit ProgramGen(core::Rng& rng) : rng_(rng) {}

  std::string num(int depth) {
    if (depth <= 0) return num_leaf();
    switch (rng_.below(12)) {
      case 0: return num_leaf();
      case 1: return "length(" + str(depth - 1) + ")";
      case 2: return "to_number(" + str(depth - 1) + (rng_.chance(0.5) ? ", " + num(depth - 1) : "") + ")";
      case 3: return pick({"min", "max"}) + "(" + num(depth - 1) + ", " + num(depth - 1) + ")";
      case 4: return "clamp(" + num(depth - 1) + ", " + num(depth - 1) + ", " + num(depth - 1) + ")";
      case 5: return "abs(" + num(depth - 1) + ")";
      case 6: return "-(" + num(depth - 1) + ")";
      case 7: return "(if " + boolean(depth - 1) + " then " + num(depth - 1) + " else " + num(depth - 1) + ")";
      case 8: {
        const std::string name = "v" + std::to_string(locals_.size());
        const std::string value = num(depth - 1);
        locals_.push_back(name);
        const std::string body = num(depth - 1);
        locals_.pop_back();
        return "(let " + name + " = " + value + " in " + body + ")";
      }
      default:
        return "(" + num(depth - 1) + " " + pick({"+", "-", "*", "/"}) + " " + num(depth - 1) + ")";
    }
  }

  std::string boolean(int depth) {
    if (depth <= 0) return pick({"true", "false", "(reward > 0)"});
    switch (rng_.below(8)) {
      case 0: return pick({"true", "false"});
      case 1:
        return pick({"contains", "icontains", "starts_with", "ends_with"}) + "(" + str(depth - 1) + ", " +
               str(depth - 1) + ")";
      case 2: return "regex_match(" + str(depth - 1) + ", " + pattern() + ")";
      case 3:
        return "(" + num(depth - 1) + " " + pick({"<", "<=", ">", ">=", "==", "!="}) + " " + num(depth - 1) + ")";
      case 4: return "(" + str(depth - 1) + " " + pick({"==", "!=", "<"}) + " " + str(depth - 1) + ")";
      case 5: return "not (" + boolean(depth - 1) + ")";
      default: return "(" + boolean(depth - 1) + " " + pick({"and", "or"}) + " " + boolean(depth - 1) + ")";
    }
  }

  std::string str(int depth) {
    if (depth <= 0) return str_leaf();
    switch (rng_.below(5)) {
      case 0: return "lower(" + str(depth - 1) + ")";
      case 1: return "extract(" + str(depth - 1) + ", " + pattern() + ")";
      case 2: return "(" + str(depth - 1) + " + " + str(depth - 1) + ")";
      default: return str_leaf();
    }
  }

 private:
  std::string pick(std::initializer_list<const char*> options) {
    const auto i = rng_.below(options.size());
    return *(options.begin() + i);
  }

  std::string num_leaf() {
    const auto r = rng_.below(locals_.empty() ? 4 : 5);
    if (r == 0) return "reward";
    if (r == 4) return locals_[rng_.below(locals_.size())];
    const double v = static_cast<double>(rng_.between(-400, 400)) / 100.0;
    std::string text = text::format_number(v);
    return v < 0 ? "(" + text + ")" : text;
  }

  std::string str_leaf() {
    if (rng_.chance(0.6)) return pick({"belief", "action", "next_state"});
    return pick({"\"\"", "\"craft\"", "\"plank=4\"", "\"Missing\"", "\"\\n\"", "\"2\"", "\"-0.5\""});
  }

  std::string pattern() { return pick({"\"\\d+\"", "\"([a-z_]+)=(\\d+)\"", "\"craft\"", "\"^[A-Z]\"", "\"(a|b)*c\""}); }

  core::Rng& rng_;
  std::vector<std::string> locals_;
};

}  // namespace

std::string random_rule(core::Rng& rng, int depth) {
  ProgramGen gen(rng);
  return "when " + gen.boolean(depth) + " score " + gen.num(depth);
}

OwnedContext random_context(core::Rng& rng) {
  const char* items[] = {"log", "plank", "stick", "coal", "torch"};
  OwnedContext c;
  const std::string item = items[rng.below(5)];
  const int n = rng.between(0, 9);
  c.belief = "Task: Obtain a " + item + ".\ninventory: " + item + "=" + std::to_string(n) + "\noptions: |craft|";
  c.action = (rng.chance(0.5) ? "craft " : "Smelt ") + item;
  c.next_state = rng.chance(0.5) ? "crafted 2 " + item + "\ninventory: plank=4" : "Missing: " + item;
  c.reward = rng.chance(0.3) ? 1.0 : 0.0;
  return c;
}

}  // namespace fixtures
