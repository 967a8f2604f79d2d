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

#include "rulefuse/bench/questions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::bench {

namespace {

constexpr std::string_view kActionMarker = "\nAction: ";

std::string line_value(std::string_view text, std::string_view prefix) {
  std::string found;
  for (const auto& line : text::split_lines(text))
    if (text::starts_with(line, prefix)) found = line.substr(prefix.size());
  return found;
}

std::string replace_line(const std::string& text, std::string_view prefix, const std::string& value) {
  auto lines = text::split_lines(text);
  for (auto& line : lines)
    if (text::starts_with(line, prefix)) line = std::string(prefix) + value;
  return text::join(lines, "\n");
}

std::string first_line(std::string_view text) {
  const auto nl = text.find('\n');
  return std::string(text.substr(0, nl));
}

}  // namespace

ToyWeakModel::ToyWeakModel(EnvConfig config, std::uint64_t seed, double accuracy)
    : config_(std::move(config)), seed_(seed), accuracy_(accuracy) {
  config_.validate();
}

neural::RawScores ToyWeakModel::score(const neural::ScoreRequest&) {
  throw ValidationError("toy-weak generator does not score candidates");
}

std::vector<std::string> ToyWeakModel::generate(const neural::GenerateRequest& request) {
  const auto at = request.context.rfind(kActionMarker);
  if (at == std::string::npos) throw ValidationError("toy-weak: context has no action line");
  const std::string_view belief = std::string_view(request.context).substr(0, at);
  const core::ActionText action(request.context.substr(at + kActionMarker.size()));
  auto parsed = parse_observation(belief);
  if (!parsed) throw ValidationError("toy-weak: context has no current state");
  ToyEnvState state = *parsed;
  std::string task = line_value(belief, "Task: Obtain a ");
  if (!task.empty() && task.back() == '.') task.pop_back();
  state.goal = task;
  state.goal_reached = state.count(task) > 0;

  const StepResult truth = env_step(config_, state, action);
  const ParsedAction pa = parse_action(action.value());
  const Recipe* recipe = pa.kind == ActionKind::kCraft || pa.kind == ActionKind::kSmelt ? config_.recipe_for(pa.target)
                                                                                        : nullptr;

  // Mistakes follow the mechanic of the step.
  std::vector<std::string> modes;
  if (recipe && !truth.legal)
    modes = {"optimistic", "optimistic", "optimistic", "wrong-reward"};
  else if (!truth.legal)
    modes = {"wrong-reward", "count-drift"};
  else if (pa.kind == ActionKind::kSmelt)
    modes = {"output-count", "no-consumption", "wrong-item"};
  else if (recipe && recipe->side_product)
    modes = {"no-side-product", "no-side-product", "no-side-product", "output-count"};
  else if (recipe)
    modes = {"output-count", "no-consumption", "wrong-item", "wrong-reward", "count-drift"};
  else
    modes = {"count-drift", "wrong-reward"};

  const std::uint64_t base = text::fnv1a64(request.context, seed_);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < request.n; ++i) {
    core::Rng rng(base ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    core::Candidate c{truth.observation, truth.reward};
    if (!rng.chance(accuracy_)) {
      const std::string& mode = modes[rng.below(modes.size())];
      ToyEnvState s = truth.state;
      std::string message = first_line(truth.observation);
      if (mode == "wrong-reward") {
        c.reward = truth.reward == 1.0 ? 0.0 : 1.0;
      } else if (mode == "count-drift") {
        if (s.inventory.empty()) {
          s.inventory[config_.recipes[rng.below(config_.recipes.size())].output.item] = 1;
        } else {
          auto it = std::next(s.inventory.begin(), static_cast<long>(rng.below(s.inventory.size())));
          it->second += rng.chance(0.5) || it->second == 1 ? 1 : -1;
        }
      } else if (mode == "optimistic") {
        s = state;
        for (const auto& [item, n] : recipe->inputs) {
          const int left = s.count(item) - n;
          if (left > 0)
            s.inventory[item] = left;
          else
            s.inventory.erase(item);
        }
        s.inventory[recipe->output.item] += recipe->output.count;
        message = (recipe->method == "craft" ? "crafted " : "smelted ") + std::to_string(recipe->output.count) + " " +
                  recipe->output.item;
      } else if (mode == "output-count") {
        s.inventory[recipe->output.item] += rng.chance(0.5) ? 1 : -1;
        if (s.inventory[recipe->output.item] <= 0) s.inventory[recipe->output.item] = recipe->output.count + 1;
      } else if (mode == "no-consumption") {
        for (const auto& [item, n] : recipe->inputs) s.inventory[item] = state.count(item);
      } else if (mode == "wrong-item") {
        const std::string& other = config_.recipes[rng.below(config_.recipes.size())].output.item;
        const int n = s.count(recipe->output.item) - state.count(recipe->output.item);
        s.inventory[recipe->output.item] -= n;
        if (s.inventory[recipe->output.item] <= 0) s.inventory.erase(recipe->output.item);
        s.inventory[other] += n;
      } else if (mode == "no-side-product") {
        const auto& sp = *recipe->side_product;
        s.inventory[sp.item] -= sp.count;
        if (s.inventory[sp.item] <= 0) s.inventory.erase(sp.item);
      }
      c.next_state = render_observation(config_, s, message);
    }
    out.push_back(core::candidate_text(c));
  }
  return out;
}

std::vector<core::Candidate> perturbations(const core::Candidate& gold, const core::ChoiceQuestion& question) {
  std::vector<core::Candidate> out;
  const auto gold_state = parse_observation(gold.next_state);
  const auto current = parse_observation(question.belief.rendered);

  if (current) {
    std::string unchanged = first_line(gold.next_state) + "\ninventory: " + render_inventory(current->inventory);
    for (const auto* key : {"stations: ", "options: "}) {
      const std::string v = line_value(question.belief.rendered, key);
      unchanged += "\n" + std::string(key) + v;
    }
    out.push_back({unchanged, gold.reward});
  }
  if (gold_state) {
    for (int delta : {1, -1}) {
      for (const auto& [item, n] : gold_state->inventory) {
        auto inv = gold_state->inventory;
        inv[item] = n + delta;
        if (inv[item] <= 0) inv.erase(item);
        out.push_back({replace_line(gold.next_state, "inventory: ", render_inventory(inv)), gold.reward});
      }
    }
    if (current) {
      for (const auto& [item, n] : gold_state->inventory) {
        if (current->count(item) == n) continue;
        for (const auto& [other, m] : current->inventory) {
          if (gold_state->count(other) > 0) continue;
          auto inv = gold_state->inventory;
          inv.erase(item);
          inv[other] = n;
          out.push_back({replace_line(gold.next_state, "inventory: ", render_inventory(inv)), gold.reward});
          break;
        }
      }
    }
  }
  out.push_back({gold.next_state, gold.reward == 1.0 ? 0.0 : 1.0});
  for (int extra = 2; extra <= 6; ++extra)
    out.push_back({gold.next_state + "\n(" + std::to_string(extra) + " more)", gold.reward});
  return out;
}

std::vector<core::ChoiceQuestion> make_questions(const std::vector<Trajectory>& trajectories,
                                                 const neural::ScorerHandle& weak, const QuestionOptions& options) {
  if (options.distractors == 0) throw ValidationError("make_questions: need at least one distractor");
  core::Rng rng(options.seed);
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t t = 0; t < trajectories.size(); ++t)
    for (std::size_t s = 0; s < trajectories[t].steps.size(); ++s) pool.emplace_back(t, s);
  rng.shuffle(pool);

  std::map<std::size_t, std::size_t> per_traj;
  std::map<std::string, std::size_t> per_cat;
  std::vector<core::ChoiceQuestion> out;
  for (const auto& [t, s] : pool) {
    if (out.size() >= options.count) break;
    const auto& traj = trajectories[t];
    const std::string& category = traj.categories[s];
    if (options.max_per_trajectory && per_traj[t] >= options.max_per_trajectory) continue;
    if (options.max_per_category && per_cat[category] >= options.max_per_category) continue;
    ++per_traj[t];
    ++per_cat[category];

    const auto& step = traj.steps[s];
    core::ChoiceQuestion q;
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%05zu", out.size());
    q.id = options.id_prefix + buf;
    q.belief = step.belief;
    q.action = step.action;
    q.category = category;
    const core::Candidate gold{step.next_state, step.reward};

    std::vector<core::Candidate> distractors;
    auto offer = [&](const core::Candidate& c) {
      if (distractors.size() >= options.distractors || c == gold) return;
      if (std::find(distractors.begin(), distractors.end(), c) != distractors.end()) return;
      distractors.push_back(c);
    };
    const auto generated = neural::generate_candidates(weak, step.belief, step.action, options.distractors + 2);
    for (const auto& c : generated.candidates) offer(c);
    if (distractors.size() < options.distractors)
      for (const auto& c : perturbations(gold, q)) offer(c);
    if (distractors.size() < options.distractors)
      throw ValidationError("make_questions: cannot find enough distractors for " + q.id);

    q.gold_index = rng.below(options.distractors + 1);
    q.candidates = distractors;
    q.candidates.insert(q.candidates.begin() + static_cast<long>(q.gold_index), gold);
    core::validate_question(q);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<dsl::RuleSource> demo_rule_sources() {
  // Shared fragments of the rule programs.
  const std::string legal =
      R"dsl(contains(extract(belief, "options: ([^\n]*)"), "|" + extract(action, " (\w+)$") + "|"))dsl";
  auto count_in = [](const std::string& text, const std::string& pattern) {
    return "to_number(extract(extract(" + text + R"dsl(, "inventory: ([^\n]*)"), )dsl" + pattern + "), 0)";
  };
  auto delta = [&](const std::string& item_expr, const std::string& expected) {
    const std::string pattern = R"dsl("(?:^|, )" + )dsl" + item_expr + R"dsl( + "=(\d+)")dsl";
    return "let before = " + count_in("belief", pattern) + " in\n  let after = " + count_in("next_state", pattern) +
           " in\n  if after == before " + expected + " then 1 else -1";
  };
  const std::string item = R"dsl(let item = extract(action, " (\w+)$") in)dsl";
  return {
      {"illegal-unchanged", "A craft or smelt that is not among the current options leaves the inventory as it was and earns nothing.",
       R"dsl(when (starts_with(action, "craft ") or starts_with(action, "smelt ")) and not )dsl" + legal +
           R"dsl(
score if extract(next_state, "inventory: ([^\n]*)") == extract(belief, "inventory: ([^\n]*)") and reward == 0
  then 1 else -1)dsl"},
      {"smelt-output", "Smelting adds exactly one of the smelted item.",
       R"dsl(when starts_with(action, "smelt ") and )dsl" + legal + "\nscore " + item + "\n  " + delta("item", "+ 1")},
      {"smelt-consumes-input", "Smelting uses up one unit of its raw input.",
       R"dsl(when starts_with(action, "smelt ") and )dsl" + legal + "\nscore " + item +
           R"dsl(
  let source = if item == "iron_ingot" then "iron_ore" else if item == "glass" then "sand" else "log" in
  )dsl" + delta("source", "- 1")},
      {"cake-returns-buckets", "Crafting a cake gives back three empty buckets.",
       R"dsl(when action == "craft cake" and )dsl" + legal + "\nscore " + delta(R"dsl("bucket")dsl", "+ 3")},
      {"sugar-returns-bottle", "Crafting sugar gives back one glass bottle.",
       R"dsl(when action == "craft sugar" and )dsl" + legal + "\nscore " + delta(R"dsl("glass_bottle")dsl", "+ 1")},
  };
}

symbolic::WeightedRuleSet demo_ruleset() {
  const auto sources = demo_rule_sources();
  return symbolic::WeightedRuleSet::make(sources, std::vector<double>(sources.size(), 1.0));
}

bool demo_covered(const std::string& category) {
  return category == "craft-illegal" || category == "smelt" || category == "side-product";
}

neural::MockTable calibrate_mock_scorer(const std::vector<core::ChoiceQuestion>& questions,
                                        const CalibrationOptions& options) {
  if (!(options.favored_loglike < 0.0)) throw ValidationError("calibration: favored log-likelihood must be negative");
  // Questions with identical requests must share scores, so decisions are
  // made per request.
  std::map<std::uint64_t, std::vector<std::size_t>> groups;
  std::vector<std::uint64_t> order;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto fp = neural::MockTable::fingerprint(neural::score_request(questions[i]));
    if (groups[fp].empty()) order.push_back(fp);
    groups[fp].push_back(i);
  }
  const auto target_correct =
      static_cast<std::size_t>(std::llround(options.target_accuracy * static_cast<double>(questions.size())));
  std::size_t to_miss = questions.size() - std::min(target_correct, questions.size());

  std::vector<std::uint64_t> covered, rest;
  for (auto fp : order) (demo_covered(questions[groups[fp].front()].category) ? covered : rest).push_back(fp);
  core::Rng rng(options.seed);
  rng.shuffle(covered);
  rng.shuffle(rest);
  std::set<std::uint64_t> missed;
  for (const auto* bucket : {&covered, &rest}) {
    for (auto fp : *bucket) {
      const std::size_t n = groups[fp].size();
      if (n > to_miss) continue;
      missed.insert(fp);
      to_miss -= n;
    }
  }

  neural::MockTable table(-50.0);
  for (auto fp : order) {
    const auto& q = questions[groups[fp].front()];
    const std::size_t k = q.size();
    std::size_t favored = q.gold_index;
    if (missed.count(fp)) favored = q.gold_index == 0 ? 1 : 0;
    const double rest_loglike = std::log((1.0 - std::exp(options.favored_loglike)) / static_cast<double>(k - 1));
    neural::MockTable::Entry e;
    // Gold is the runner-up when missed.
    std::size_t rank = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == favored)
        e.loglikes.push_back(options.favored_loglike);
      else if (i == q.gold_index)
        e.loglikes.push_back(rest_loglike - 0.01);
      else
        e.loglikes.push_back(rest_loglike - 0.01 * static_cast<double>(++rank));
      e.token_counts.push_back(neural::approx_token_count(core::candidate_text(q.candidates[i])));
    }
    table.set(fp, std::move(e));
  }
  return table;
}

BenchFiles generate_bench(const BenchSpec& spec) {
  spec.env.validate();
  auto stream = [&](std::string_view name) { return text::fnv1a64(name, spec.seed); };
  BenchFiles files;
  auto train = generate_trajectories(spec.env, Policy::kGoalDirected, spec.train_goal_directed, stream("train-goal"),
                                     "train-g");
  auto train_random =
      generate_trajectories(spec.env, Policy::kRandom, spec.train_random, stream("train-random"), "train-r");
  train.insert(train.end(), train_random.begin(), train_random.end());
  files.train = flatten(train);

  neural::ScorerHandle weak{std::make_shared<ToyWeakModel>(spec.env, stream("weak")), {}};
  auto questions_for = [&](const std::string& name, std::size_t count) {
    auto trajs = generate_trajectories(spec.env, Policy::kGoalDirected, count, stream(name + "-goal"), name + "-g");
    auto random = generate_trajectories(spec.env, Policy::kRandom, count / 2, stream(name + "-random"), name + "-r");
    trajs.insert(trajs.end(), random.begin(), random.end());
    QuestionOptions qo;
    qo.count = count;
    qo.distractors = spec.distractors;
    qo.seed = stream(name + "-questions");
    qo.max_per_trajectory = 3;
    qo.max_per_category = (count * 3 + 9) / 10;
    qo.id_prefix = name;
    auto qs = make_questions(trajs, weak, qo);
    if (qs.size() < count)
      throw ValidationError("bench: only " + std::to_string(qs.size()) + " " + name + " questions could be drawn");
    return qs;
  };
  files.dev = questions_for("dev", spec.dev_questions);
  files.test = questions_for("test", spec.test_questions);

  CalibrationOptions co;
  co.target_accuracy = spec.target_accuracy;
  co.seed = stream("calibrate-dev");
  files.scorer = calibrate_mock_scorer(files.dev, co);
  co.seed = stream("calibrate-test");
  files.scorer.merge(calibrate_mock_scorer(files.test, co));
  return files;
}

void write_bench(const std::filesystem::path& dir, const BenchSpec& spec, const BenchFiles& files) {
  std::filesystem::create_directories(dir);
  core::write_file(dir / "env.json", env_to_json(spec.env));
  core::steps_save(dir / "train_steps.jsonl", files.train);
  core::dataset_save(dir / "dev.jsonl", files.dev);
  core::dataset_save(dir / "test.jsonl", files.test);
  files.scorer.save(dir / "mock_scorer.json");
  symbolic::ruleset_save(dir / "demo_rules.json", demo_ruleset());
}

}  // namespace rulefuse::bench
