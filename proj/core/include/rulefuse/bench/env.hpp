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

// A small crafting game with recipes, stations, side products and illegal
// moves, used to generate trajectories and benchmark questions.
//
// Actions: "craft <item>", "smelt <item>", "move <station>" (places a
// station item from the inventory), "wait" and "look". Anything else is
// illegal. Observations have four lines:
//
//   <message>
//   inventory: log=1, plank=4        (or "inventory: (empty)")
//   stations: crafting_table         (or "stations: (none)")
//   options: |plank|stick|           (items that can be crafted or smelted now)

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rulefuse/core/types.hpp"

namespace rulefuse::bench {

struct ItemCount {
  std::string item;
  int count = 1;

  friend bool operator==(const ItemCount&, const ItemCount&) = default;
};

struct Recipe {
  // "craft" or "smelt".
  std::string method = "craft";
  std::map<std::string, int> inputs;
  ItemCount output;
  std::optional<ItemCount> side_product;
  // Station that must be placed; empty for none.
  std::string station;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

struct EnvConfig {
  std::vector<Recipe> recipes;
  std::vector<std::string> goals;
  // Items a station action can place.
  std::vector<std::string> stations = {"crafting_table", "furnace"};
  // Raw items added on top of what the goal needs: item -> [min, max].
  std::map<std::string, std::pair<int, int>> extras;
  // Chance that each station starts placed.
  double station_probability = 0.25;
  // Goal-directed runs insert a wait or an illegal move before a planned
  // action with this probability.
  double noise_probability = 0.3;
  std::size_t max_random_steps = 10;

  // Throws ValidationError on empty inputs, non-positive counts, unknown
  // methods or duplicate outputs.
  void validate() const;
  const Recipe* recipe_for(std::string_view item) const;
};

EnvConfig default_env();
std::string env_to_json(const EnvConfig& config);
EnvConfig env_from_json(std::string_view json);
EnvConfig env_load(const std::filesystem::path& path);

struct ToyEnvState {
  std::map<std::string, int> inventory;
  std::set<std::string> stations;
  std::string goal;
  bool goal_reached = false;

  int count(const std::string& item) const;
  friend bool operator==(const ToyEnvState&, const ToyEnvState&) = default;
};

enum class ActionKind { kCraft, kSmelt, kMove, kWait, kLook, kInvalid };

struct ParsedAction {
  ActionKind kind = ActionKind::kInvalid;
  std::string target;
};

ParsedAction parse_action(std::string_view action);

struct StepResult {
  ToyEnvState state;
  std::string observation;
  double reward = 0.0;
  bool legal = true;
  // goal-step, craft-illegal, smelt, side-product or craft-legal.
  std::string category;
};

// Pure transition function.
StepResult env_step(const EnvConfig& config, const ToyEnvState& state, const core::ActionText& action);

std::vector<std::string> legal_options(const EnvConfig& config, const ToyEnvState& state);
std::string render_observation(const EnvConfig& config, const ToyEnvState& state, std::string_view message);
std::string render_inventory(const std::map<std::string, int>& inventory);
std::string task_description(const std::string& goal);

// Parses the last inventory / stations lines of a text back into a state.
// Returns nullopt when either line is missing.
std::optional<ToyEnvState> parse_observation(std::string_view text);

struct Trajectory {
  std::string id;
  std::string task;
  ToyEnvState initial;
  std::string initial_observation;
  std::vector<core::TransitionStep> steps;
  std::vector<std::string> categories;
};

enum class Policy { kRandom, kGoalDirected };
std::string_view policy_name(Policy policy);
Policy parse_policy(std::string_view name);

// Deterministic under seed. Every step's history starts with a "look" entry
// holding the initial observation. Goal-directed trajectories end with
// reward 1.0; random ones stop early if they reach the goal.
std::vector<Trajectory> generate_trajectories(const EnvConfig& config, Policy policy, std::size_t n, std::uint64_t seed,
                                              const std::string& id_prefix = "t");

// Actions that reach the goal from `state`, or nullopt.
std::optional<std::vector<std::string>> plan_actions(const EnvConfig& config, const ToyEnvState& state);

std::vector<core::TransitionStep> flatten(const std::vector<Trajectory>& trajectories);

// Replays each trajectory's actions from its initial state; returns the
// first mismatch as "<trajectory>#<step>", or an empty string.
std::string replay_mismatch(const EnvConfig& config, const std::vector<Trajectory>& trajectories);

}  // namespace rulefuse::bench
