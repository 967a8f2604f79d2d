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

#include "rulefuse/core/belief.hpp"

#include <utility>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::core {

namespace {

EnvTemplate plain_template() {
  EnvTemplate t;
  t.id = "plain";
  return t;
}

// Compact step lines plus a "Current state" block holding everything but
// the first (message) line of the newest observation. Keeps state-describing
// lines such as "inventory: ..." unique within the context.
EnvTemplate toy_template() {
  EnvTemplate t;
  t.id = "toy";
  t.step = "step {index} | action: {action} | observation: {observation} | reward: {reward}\n";
  t.observation_first_line_only = true;
  t.history_char_budget = 2000;
  t.max_history_steps = 8;
  return t;
}

}  // namespace

TemplateRegistry TemplateRegistry::with_builtins() {
  TemplateRegistry r;
  r.add(plain_template());
  r.add(toy_template());
  return r;
}

void TemplateRegistry::add(EnvTemplate tmpl) {
  if (tmpl.id.empty()) throw ValidationError("template id is empty");
  const std::string id = tmpl.id;
  templates_.insert_or_assign(id, std::move(tmpl));
}

bool TemplateRegistry::contains(const std::string& id) const { return templates_.count(id) > 0; }

const EnvTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ValidationError("unknown environment template '" + id + "'");
  return it->second;
}

const TemplateRegistry& default_templates() {
  static const TemplateRegistry registry = TemplateRegistry::with_builtins();
  return registry;
}

BeliefState render_belief(const std::string& task_description, std::vector<HistoryEntry> history,
                          const EnvTemplate& tmpl) {
  if (text::trim(task_description).empty()) throw ValidationError("task description is empty");

  auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  auto block_length = [&](const HistoryEntry& e, std::size_t index) {
    return text::substitute(tmpl.step, {{"index", std::to_string(index)},
                                        {"action", e.action},
                                        {"observation", tmpl.observation_first_line_only ? first_line(e.observation)
                                                                                         : e.observation},
                                        {"reward", text::format_number(e.reward)}})
        .size();
  };

  // Walk back from the newest entry. Labels are positions inside the kept
  // window, so re-rendering an already truncated history is idempotent. The
  // newest entry is always kept.
  std::size_t keep = 0;
  std::size_t chars = 0;
  while (keep < history.size() && keep < tmpl.max_history_steps) {
    const HistoryEntry& e = history[history.size() - 1 - keep];
    // Exact labels depend on the final window size; index digit count can
    // only shrink as the window shrinks, so measuring with the widest label
    // is conservative.
    const std::size_t len = block_length(e, history.size());
    if (keep > 0 && chars + len > tmpl.history_char_budget) break;
    chars += len;
    ++keep;
  }
  history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(keep));

  std::string out = text::substitute(tmpl.header, {{"task", task_description}});
  out += tmpl.history_heading;
  if (history.empty()) {
    out += tmpl.empty_history;
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    const HistoryEntry& e = history[i];
    out += text::substitute(
        tmpl.step, {{"index", std::to_string(i + 1)},
                    {"action", e.action},
                    {"observation", tmpl.observation_first_line_only ? first_line(e.observation) : e.observation},
                    {"reward", text::format_number(e.reward)}});
  }
  if (tmpl.observation_first_line_only && !history.empty()) {
    const std::string& obs = history.back().observation;
    const std::size_t nl = obs.find('\n');
    if (nl != std::string::npos) {
      out += tmpl.current_state_heading;
      out += obs.substr(nl + 1);
      if (out.back() != '\n') out += '\n';
    }
  }

  BeliefState belief;
  belief.task_description = task_description;
  belief.history = std::move(history);
  belief.rendered = std::move(out);
  belief.template_id = tmpl.id;
  return belief;
}

BeliefState render_belief(const std::string& task_description, std::vector<HistoryEntry> history,
                          const std::string& template_id, const TemplateRegistry& registry) {
  return render_belief(task_description, std::move(history), registry.get(template_id));
}

}  // namespace rulefuse::core
