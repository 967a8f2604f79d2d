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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rulefuse/core/types.hpp"

namespace rulefuse::core {

// Environment-specific layout of the belief context.
//
// `header` may use {task}. `step` may use {index} (1-based position in the
// full history), {action}, {observation} and {reward}. When
// `observation_first_line_only` is set, history steps show only the first
// line of each observation and the remaining lines of the newest observation
// are rendered once under `current_state_heading`. History is dropped from
// the oldest side until both `max_history_steps` and `history_char_budget`
// (total characters of rendered step blocks) are respected.
struct EnvTemplate {
  std::string id;
  std::string header = "Task: {task}\n";
  std::string history_heading = "History:\n";
  std::string step = "step {index}\naction: {action}\nobservation: {observation}\nreward: {reward}\n";
  std::string empty_history = "(no history)\n";
  std::string truncated_marker = "(earlier steps omitted)\n";
  bool observation_first_line_only = false;
  std::string current_state_heading = "Current state:\n";
  std::size_t history_char_budget = 4000;
  std::size_t max_history_steps = 16;
};

class TemplateRegistry {
 public:
  // Registry holding the built-in "plain" and "toy" templates.
  static TemplateRegistry with_builtins();

  void add(EnvTemplate tmpl);
  bool contains(const std::string& id) const;
  // Throws ValidationError for unknown ids.
  const EnvTemplate& get(const std::string& id) const;

 private:
  std::map<std::string, EnvTemplate> templates_;
};

const TemplateRegistry& default_templates();

// Builds a BeliefState. Throws ValidationError on an empty task description
// or an unknown template id.
BeliefState render_belief(const std::string& task_description, std::vector<HistoryEntry> history,
                          const EnvTemplate& tmpl);
BeliefState render_belief(const std::string& task_description, std::vector<HistoryEntry> history,
                          const std::string& template_id,
                          const TemplateRegistry& registry = default_templates());

}  // namespace rulefuse::core
