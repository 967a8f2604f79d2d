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

#include "rulefuse/bench/env.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "rulefuse/core/belief.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::bench {

using nlohmann::json;

namespace {

Recipe make_recipe(std::string method, std::map<std::string, int> inputs, ItemCount output,
                   std::optional<ItemCount> side = std::nullopt, std::string station = "") {
  Recipe r;
  r.method = std::move(method);
  r.inputs = std::move(inputs);
  r.output = std::move(output);
  r.side_product = std::move(side);
  r.station = std::move(station);
  return r;
}

}  // namespace

void EnvConfig::validate() const {
  if (recipes.empty()) throw ValidationError("environment has no recipes");
  std::set<std::string> outputs;
  for (const auto& r : recipes) {
    if (r.method != "craft" && r.method != "smelt")
      throw ValidationError("recipe for '" + r.output.item + "': unknown method '" + r.method + "'");
    if (r.inputs.empty()) throw ValidationError("recipe for '" + r.output.item + "' has no inputs");
    if (r.output.item.empty() || r.output.count < 1)
      throw ValidationError("recipe output must name an item with count >= 1");
    for (const auto& [item, n] : r.inputs)
      if (n < 1) throw ValidationError("recipe for '" + r.output.item + "': input '" + item + "' count < 1");
    if (r.side_product && r.side_product->count < 1)
      throw ValidationError("recipe for '" + r.output.item + "': side product count < 1");
    if (!outputs.insert(r.output.item).second)
      throw ValidationError("more than one recipe produces '" + r.output.item + "'");
  }
  if (goals.empty()) throw ValidationError("environment has no goals");
  for (const auto& [item, range] : extras)
    if (range.first < 0 || range.second < range.first)
      throw ValidationError("extra range for '" + item + "' is invalid");
  if (station_probability < 0.0 || station_probability > 1.0 || noise_probability < 0.0 || noise_probability > 1.0)
    throw ValidationError("probabilities must be in [0, 1]");
}

const Recipe* EnvConfig::recipe_for(std::string_view item) const {
  for (const auto& r : recipes)
    if (r.output.item == item) return &r;
  return nullptr;
}

EnvConfig default_env() {
  EnvConfig c;
  c.recipes = {
      make_recipe("craft", {{"log", 1}}, {"plank", 4}),
      make_recipe("craft", {{"plank", 2}}, {"stick", 1}),
      make_recipe("craft", {{"plank", 4}}, {"crafting_table", 1}),
      make_recipe("craft", {{"cobblestone", 8}}, {"furnace", 1}, std::nullopt, "crafting_table"),
      make_recipe("craft", {{"stick", 1}, {"coal", 1}}, {"torch", 4}),
      make_recipe("craft", {{"iron_ingot", 3}}, {"bucket", 1}, std::nullopt, "crafting_table"),
      make_recipe("craft", {{"milk_bucket", 3}, {"sugar", 2}, {"egg", 1}, {"wheat", 3}}, {"cake", 1},
                  ItemCount{"bucket", 3}, "crafting_table"),
      make_recipe("craft", {{"honey_bottle", 1}}, {"sugar", 3}, ItemCount{"glass_bottle", 1}),
      make_recipe("smelt", {{"iron_ore", 1}}, {"iron_ingot", 1}, std::nullopt, "furnace"),
      make_recipe("smelt", {{"sand", 1}}, {"glass", 1}, std::nullopt, "furnace"),
      make_recipe("smelt", {{"log", 1}}, {"charcoal", 1}, std::nullopt, "furnace"),
  };
  c.goals = {"stick", "crafting_table", "torch", "bucket", "cake", "sugar", "iron_ingot", "glass", "charcoal"};
  c.extras = {{"log", {0, 2}},  {"coal", {0, 1}}, {"iron_ore", {0, 2}},     {"sand", {0, 2}},
              {"cobblestone", {0, 3}}, {"honey_bottle", {0, 1}}, {"wheat", {0, 1}}};
  return c;
}

namespace {

json item_json(const ItemCount& ic) { return {{"item", ic.item}, {"count", ic.count}}; }

ItemCount item_from(const json& j) { return {j.at("item").get<std::string>(), j.value("count", 1)}; }

}  // namespace

std::string env_to_json(const EnvConfig& c) {
  json recipes = json::array();
  for (const auto& r : c.recipes) {
    json jr = {{"method", r.method}, {"inputs", r.inputs}, {"output", item_json(r.output)}, {"station", r.station}};
    if (r.side_product) jr["side_product"] = item_json(*r.side_product);
    recipes.push_back(jr);
  }
  json extras = json::object();
  for (const auto& [item, range] : c.extras) extras[item] = {range.first, range.second};
  json j = {{"recipes", recipes},
            {"goals", c.goals},
            {"stations", c.stations},
            {"extras", extras},
            {"station_probability", c.station_probability},
            {"noise_probability", c.noise_probability},
            {"max_random_steps", c.max_random_steps}};
  return j.dump(2) + "\n";
}

EnvConfig env_from_json(std::string_view text) {
  EnvConfig c;
  try {
    const json j = json::parse(text);
    c.recipes.clear();
    for (const auto& jr : j.at("recipes")) {
      Recipe r;
      r.method = jr.value("method", "craft");
      r.inputs = jr.at("inputs").get<std::map<std::string, int>>();
      r.output = item_from(jr.at("output"));
      if (jr.contains("side_product") && !jr.at("side_product").is_null()) r.side_product = item_from(jr.at("side_product"));
      r.station = jr.value("station", "");
      c.recipes.push_back(std::move(r));
    }
    c.goals = j.at("goals").get<std::vector<std::string>>();
    if (j.contains("stations")) c.stations = j.at("stations").get<std::vector<std::string>>();
    c.extras.clear();
    if (j.contains("extras"))
      for (const auto& [item, range] : j.at("extras").items())
        c.extras[item] = {range.at(0).get<int>(), range.at(1).get<int>()};
    c.station_probability = j.value("station_probability", c.station_probability);
    c.noise_probability = j.value("noise_probability", c.noise_probability);
    c.max_random_steps = j.value("max_random_steps", c.max_random_steps);
  } catch (const json::exception& e) {
    throw FormatError(std::string("environment config: ") + e.what());
  }
  c.validate();
  return c;
}

EnvConfig env_load(const std::filesystem::path& path) { return env_from_json(core::read_file(path)); }

int ToyEnvState::count(const std::string& item) const {
  auto it = inventory.find(item);
  return it == inventory.end() ? 0 : it->second;
}

ParsedAction parse_action(std::string_view action) {
  const std::string a(text::trim(action));
  if (a == "wait") return {ActionKind::kWait, ""};
  if (a == "look") return {ActionKind::kLook, ""};
  const auto space = a.find(' ');
  if (space == std::string::npos) return {ActionKind::kInvalid, a};
  const std::string verb = a.substr(0, space);
  std::string target(text::trim(std::string_view(a).substr(space + 1)));
  if (target.empty() || target.find(' ') != std::string::npos) return {ActionKind::kInvalid, a};
  if (verb == "craft") return {ActionKind::kCraft, target};
  if (verb == "smelt") return {ActionKind::kSmelt, target};
  if (verb == "move") return {ActionKind::kMove, target};
  return {ActionKind::kInvalid, a};
}

namespace {

// Empty when the recipe can run; otherwise the missing item or station.
std::string missing_for(const Recipe& r, const ToyEnvState& s) {
  if (!r.station.empty() && !s.stations.count(r.station)) return r.station;
  for (const auto& [item, n] : r.inputs)
    if (s.count(item) < n) return item;
  return "";
}

void add(std::map<std::string, int>& inv, const std::string& item, int n) {
  const int v = (inv.count(item) ? inv[item] : 0) + n;
  if (v == 0)
    inv.erase(item);
  else
    inv[item] = v;
}

}  // namespace

std::vector<std::string> legal_options(const EnvConfig& config, const ToyEnvState& state) {
  std::vector<std::string> out;
  for (const auto& r : config.recipes)
    if (missing_for(r, state).empty()) out.push_back(r.output.item);
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_inventory(const std::map<std::string, int>& inventory) {
  std::string s;
  for (const auto& [item, n] : inventory) {
    if (n == 0) continue;
    if (!s.empty()) s += ", ";
    s += item + "=" + std::to_string(n);
  }
  return s.empty() ? "(empty)" : s;
}

std::string render_observation(const EnvConfig& config, const ToyEnvState& state, std::string_view message) {
  std::string stations;
  for (const auto& s : state.stations) stations += (stations.empty() ? "" : ", ") + s;
  std::string options = "|";
  for (const auto& o : legal_options(config, state)) options += o + "|";
  if (options == "|") options = "||";
  return std::string(message) + "\ninventory: " + render_inventory(state.inventory) +
         "\nstations: " + (stations.empty() ? "(none)" : stations) + "\noptions: " + options;
}

std::string task_description(const std::string& goal) { return "Obtain a " + goal + "."; }

std::optional<ToyEnvState> parse_observation(std::string_view text) {
  std::optional<std::string> inv_line, station_line;
  for (const auto& line : text::split_lines(text)) {
    if (text::starts_with(line, "inventory: ")) inv_line = line.substr(11);
    if (text::starts_with(line, "stations: ")) station_line = line.substr(10);
  }
  if (!inv_line || !station_line) return std::nullopt;
  ToyEnvState s;
  if (*inv_line != "(empty)") {
    std::size_t pos = 0;
    while (pos <= inv_line->size()) {
      std::size_t end = inv_line->find(", ", pos);
      if (end == std::string::npos) end = inv_line->size();
      const std::string part = inv_line->substr(pos, end - pos);
      const auto eq = part.find('=');
      if (eq == std::string::npos) return std::nullopt;
      try {
        s.inventory[part.substr(0, eq)] = std::stoi(part.substr(eq + 1));
      } catch (const std::exception&) {
        return std::nullopt;
      }
      pos = end + 2;
    }
  }
  if (*station_line != "(none)") {
    std::size_t pos = 0;
    while (pos <= station_line->size()) {
      std::size_t end = station_line->find(", ", pos);
      if (end == std::string::npos) end = station_line->size();
      s.stations.insert(station_line->substr(pos, end - pos));
      pos = end + 2;
    }
  }
  return s;
}

StepResult env_step(const EnvConfig& config, const ToyEnvState& state, const core::ActionText& action) {
  StepResult out;
  out.state = state;
  const ParsedAction pa = parse_action(action.value());
  std::string message;
  bool side = false;
  auto illegal = [&](std::string msg) {
    out.legal = false;
    message = std::move(msg);
  };

  switch (pa.kind) {
    case ActionKind::kWait:
      message = "you wait";
      break;
    case ActionKind::kLook:
      message = "you look around";
      break;
    case ActionKind::kMove:
      if (std::find(config.stations.begin(), config.stations.end(), pa.target) == config.stations.end())
        illegal("not a station: " + pa.target);
      else if (state.stations.count(pa.target))
        illegal("already placed: " + pa.target);
      else if (state.count(pa.target) < 1)
        illegal("missing: " + pa.target);
      else {
        add(out.state.inventory, pa.target, -1);
        out.state.stations.insert(pa.target);
        message = "placed " + pa.target;
      }
      break;
    case ActionKind::kCraft:
    case ActionKind::kSmelt: {
      const std::string method = pa.kind == ActionKind::kCraft ? "craft" : "smelt";
      const Recipe* r = config.recipe_for(pa.target);
      if (!r || r->method != method) {
        illegal("cannot " + method + ": " + pa.target);
        break;
      }
      const std::string missing = missing_for(*r, state);
      if (!missing.empty()) {
        illegal("missing: " + missing);
        break;
      }
      for (const auto& [item, n] : r->inputs) add(out.state.inventory, item, -n);
      add(out.state.inventory, r->output.item, r->output.count);
      message = (method == "craft" ? "crafted " : "smelted ") + std::to_string(r->output.count) + " " + r->output.item;
      if (r->side_product) {
        add(out.state.inventory, r->side_product->item, r->side_product->count);
        message += " and " + std::to_string(r->side_product->count) + " " + r->side_product->item;
        side = true;
      }
      break;
    }
    case ActionKind::kInvalid:
      illegal("unknown action: " + pa.target);
      break;
  }

  if (out.legal && !out.state.goal_reached && out.state.count(out.state.goal) > 0) {
    out.state.goal_reached = true;
    out.reward = 1.0;
  }
  out.observation = render_observation(config, out.state, message);
  if (out.reward == 1.0)
    out.category = "goal-step";
  else if (!out.legal)
    out.category = "craft-illegal";
  else if (pa.kind == ActionKind::kSmelt)
    out.category = "smelt";
  else if (side)
    out.category = "side-product";
  else
    out.category = "craft-legal";
  return out;
}

std::string_view policy_name(Policy policy) { return policy == Policy::kRandom ? "random" : "goal-directed"; }

Policy parse_policy(std::string_view name) {
  if (name == "random") return Policy::kRandom;
  if (name == "goal-directed") return Policy::kGoalDirected;
  throw ValidationError("unknown policy '" + std::string(name) + "'");
}

namespace {

struct Planner {
  const EnvConfig& config;
  ToyEnvState state;
  std::vector<std::string> actions;
  // When set, missing raw items are conjured and recorded here.
  std::map<std::string, int>* needs = nullptr;

  bool apply(const std::string& action) {
    const auto res = env_step(config, state, core::ActionText(action));
    if (!res.legal) return false;
    state = res.state;
    actions.push_back(action);
    return true;
  }

  bool acquire(const std::string& item, int count, int depth) {
    if (depth > 16) return false;
    for (int guard = 0; state.count(item) < count; ++guard) {
      if (guard > 64) return false;
      const Recipe* r = config.recipe_for(item);
      if (!r) {
        if (!needs) return false;
        const int deficit = count - state.count(item);
        add(state.inventory, item, deficit);
        (*needs)[item] += deficit;
        continue;
      }
      if (!r->station.empty() && !state.stations.count(r->station)) {
        if (!acquire(r->station, 1, depth + 1) || !apply("move " + r->station)) return false;
      }
      bool ready = false;
      for (int round = 0; round < 8 && !ready; ++round) {
        for (const auto& [in, n] : r->inputs)
          if (!acquire(in, n, depth + 1)) return false;
        ready = missing_for(*r, state).empty();
      }
      if (!ready || !apply(r->method + " " + item)) return false;
    }
    return true;
  }
};

ToyEnvState initial_state(const EnvConfig& config, const std::string& goal, core::Rng& rng) {
  ToyEnvState s;
  s.goal = goal;
  for (const auto& st : config.stations)
    if (rng.chance(config.station_probability)) s.stations.insert(st);
  std::map<std::string, int> needs;
  Planner p{config, s, {}, &needs};
  p.acquire(goal, 1, 0);
  s.inventory = needs;
  for (const auto& [item, range] : config.extras) {
    if (item == goal) continue;
    const int n = rng.between(range.first, range.second);
    if (n > 0) add(s.inventory, item, n);
  }
  return s;
}

std::vector<std::string> noise_actions(const EnvConfig& config, const ToyEnvState& state) {
  std::vector<std::string> out = {"wait"};
  for (const auto& r : config.recipes)
    if (!missing_for(r, state).empty()) out.push_back(r.method + " " + r.output.item);
  return out;
}

std::vector<std::string> random_pool(const EnvConfig& config) {
  std::vector<std::string> out;
  for (const auto& r : config.recipes) out.push_back(r.method + " " + r.output.item);
  for (const auto& s : config.stations) out.push_back("move " + s);
  out.push_back("wait");
  return out;
}

}  // namespace

std::optional<std::vector<std::string>> plan_actions(const EnvConfig& config, const ToyEnvState& state) {
  Planner p{config, state, {}, nullptr};
  if (!p.acquire(state.goal, 1, 0)) return std::nullopt;
  return p.actions;
}

std::vector<Trajectory> generate_trajectories(const EnvConfig& config, Policy policy, std::size_t n, std::uint64_t seed,
                                              const std::string& id_prefix) {
  config.validate();
  core::Rng rng(seed);
  std::vector<Trajectory> out;
  const auto pool = random_pool(config);
  for (std::size_t t = 0; t < n; ++t) {
    Trajectory traj;
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%05zu", t);
    traj.id = id_prefix + buf;
    const std::string goal = config.goals[rng.below(config.goals.size())];
    traj.task = task_description(goal);
    traj.initial = initial_state(config, goal, rng);
    traj.initial_observation = render_observation(config, traj.initial, "you look around");

    std::vector<std::string> actions;
    if (policy == Policy::kGoalDirected) {
      auto plan = plan_actions(config, traj.initial);
      if (!plan) throw ValidationError("goal '" + goal + "' is unreachable from the generated inventory");
      ToyEnvState sim = traj.initial;
      for (const auto& a : *plan) {
        if (rng.chance(config.noise_probability)) {
          const auto noise = noise_actions(config, sim);
          actions.push_back(noise[rng.below(noise.size())]);
        }
        actions.push_back(a);
        sim = env_step(config, sim, core::ActionText(a)).state;
      }
    } else {
      ToyEnvState sim = traj.initial;
      for (std::size_t i = 0; i < config.max_random_steps; ++i) {
        actions.push_back(pool[rng.below(pool.size())]);
        const auto res = env_step(config, sim, core::ActionText(actions.back()));
        sim = res.state;
        if (res.reward == 1.0) break;
      }
    }

    std::vector<core::HistoryEntry> history = {{"look", traj.initial_observation, 0.0}};
    ToyEnvState state = traj.initial;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const core::ActionText act(actions[i]);
      const auto res = env_step(config, state, act);
      core::TransitionStep step;
      step.belief = core::render_belief(traj.task, history, "toy");
      step.action = act;
      step.next_state = res.observation;
      step.reward = res.reward;
      step.trajectory_id = traj.id;
      step.step_index = i;
      traj.steps.push_back(std::move(step));
      traj.categories.push_back(res.category);
      history.push_back({actions[i], res.observation, res.reward});
      state = res.state;
    }
    out.push_back(std::move(traj));
  }
  return out;
}

std::vector<core::TransitionStep> flatten(const std::vector<Trajectory>& trajectories) {
  std::vector<core::TransitionStep> out;
  for (const auto& t : trajectories) out.insert(out.end(), t.steps.begin(), t.steps.end());
  return out;
}

std::string replay_mismatch(const EnvConfig& config, const std::vector<Trajectory>& trajectories) {
  for (const auto& t : trajectories) {
    ToyEnvState state = t.initial;
    for (const auto& step : t.steps) {
      const auto res = env_step(config, state, step.action);
      if (res.observation != step.next_state || res.reward != step.reward)
        return t.id + "#" + std::to_string(step.step_index);
      state = res.state;
    }
  }
  return "";
}

}  // namespace rulefuse::bench
