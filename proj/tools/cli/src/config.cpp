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

#include "rulefuse/cli/config.hpp"

#include <set>
#include <sstream>

#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"
#include "toml.hpp"

namespace rulefuse::cli {

namespace {

// Reads typed values from one table and remembers which keys were used, so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string name, std::filesystem::path base)
      : table_(table), name_(std::move(name)), base_(std::move(base)) {}

  bool present() const { return table_ != nullptr; }

  template <typename T>
  void get(const char* key, T& out) {
    const toml::node* node = find(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!node->is_boolean()) fail(key, "a boolean");
      out = node->as_boolean()->get();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!node->is_string()) fail(key, "a string");
      out = node->as_string()->get();
    } else if constexpr (std::is_same_v<T, double>) {
      if (node->is_integer())
        out = static_cast<double>(node->as_integer()->get());
      else if (node->is_floating_point())
        out = node->as_floating_point()->get();
      else
        fail(key, "a number");
    } else {
      if (!node->is_integer() || node->as_integer()->get() < 0) fail(key, "a non-negative integer");
      out = static_cast<T>(node->as_integer()->get());
    }
  }

  void path(const char* key, std::filesystem::path& out) {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_relative() && !base_.empty() ? base_ / p : p;
  }

  // Numbers are accepted and turned into their text form.
  void text_or_number(const char* key, std::string& out) {
    const toml::node* node = find(key);
    if (!node) return;
    if (node->is_string())
      out = node->as_string()->get();
    else if (node->is_integer())
      out = std::to_string(node->as_integer()->get());
    else if (node->is_floating_point())
      out = text::format_number(node->as_floating_point()->get());
    else
      fail(key, "a string or number");
  }

  void numbers(const char* key, std::vector<double>& out) {
    const toml::node* node = find(key);
    if (!node) return;
    if (!node->is_array()) fail(key, "an array of numbers");
    out.clear();
    for (const auto& v : *node->as_array()) {
      if (v.is_integer())
        out.push_back(static_cast<double>(v.as_integer()->get()));
      else if (v.is_floating_point())
        out.push_back(v.as_floating_point()->get());
      else
        fail(key, "an array of numbers");
    }
  }

  void check_unknown(const std::set<std::string>& subtables = {}) const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (used_.count(key) || subtables.count(key)) continue;
      throw ValidationError("config: unknown key '" + qualified(key) + "'");
    }
  }

 private:
  const toml::node* find(const char* key) {
    used_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }
  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }
  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw FormatError("config: '" + qualified(key) + "' must be " + expected);
  }

  const toml::table* table_;
  std::string name_;
  std::filesystem::path base_;
  std::set<std::string> used_;
};

ScorerSettings read_scorer(Section s, ScorerSettings out) {
  s.get("kind", out.kind);
  s.path("table", out.table);
  s.path("replay", out.replay);
  s.get("endpoint", out.http.endpoint);
  s.get("token_env", out.http.token_env);
  s.get("timeout_seconds", out.http.timeout_seconds);
  s.get("max_retries", out.http.max_retries);
  s.get("normalization", out.normalization);
  s.get("record", out.record);
  s.check_unknown();
  return out;
}

}  // namespace

CliConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at line " << e.source().begin.line;
    throw FormatError(msg.str());
  }
  auto section = [&](const char* name) { return Section(root.get_as<toml::table>(name), name, base_dir); };

  CliConfig c;
  Section top(&root, "", base_dir);
  top.path("run_dir", c.run_dir);
  top.get("workers", c.workers);
  top.get("belief_template", c.belief_template);
  const std::set<std::string> tables = {"data",      "scorer",    "updated_scorer", "llm",    "gamma",
                                        "induction", "selection", "weights",        "bench"};
  for (const auto& t : tables)
    if (root.contains(t) && !root.get_as<toml::table>(t)) throw FormatError("config: '" + t + "' must be a table");
  top.check_unknown(tables);

  Section data = section("data");
  data.path("dev", c.dev);
  data.path("test", c.test);
  data.path("train", c.train);
  data.path("ruleset", c.ruleset);
  data.path("env", c.env);
  data.check_unknown();

  c.scorer = read_scorer(section("scorer"), c.scorer);
  if (Section u = section("updated_scorer"); u.present()) c.updated_scorer = read_scorer(u, c.scorer);

  Section llm = section("llm");
  llm.get("kind", c.llm.kind);
  llm.path("script", c.llm.script);
  llm.get("endpoint", c.llm.chat.endpoint);
  llm.get("model", c.llm.chat.model);
  llm.get("temperature", c.llm.chat.temperature);
  llm.get("token_env", c.llm.chat.token_env);
  llm.get("system_prompt", c.llm.chat.system_prompt);
  llm.get("timeout_seconds", c.llm.chat.timeout_seconds);
  llm.get("max_retries", c.llm.chat.max_retries);
  llm.get("record", c.llm.record);
  llm.check_unknown();

  Section gamma = section("gamma");
  gamma.text_or_number("policy", c.gamma);
  gamma.get("scope", c.gamma_scope);
  gamma.check_unknown();

  Section ind = section("induction");
  ind.get("max_accepted_rules", c.induction.max_accepted_rules);
  ind.get("max_reflections", c.induction.max_reflections);
  ind.get("max_clusters", c.induction.max_clusters);
  ind.get("prompts", c.prompts);
  ind.get("min_samples", c.induction.cluster.min_samples);
  ind.get("xi", c.induction.cluster.xi);
  ind.get("min_cluster_fraction", c.induction.cluster.min_cluster_fraction);
  ind.check_unknown();
  // A prompt directory is a path; built-in ids are not.
  if (c.prompts.find('/') != std::string::npos && !base_dir.empty() && std::filesystem::path(c.prompts).is_relative())
    c.prompts = (base_dir / c.prompts).string();

  Section sel = section("selection");
  sel.get("budget_fraction", c.budget_fraction);
  sel.get("seed", c.selection_seed);
  sel.check_unknown();

  Section w = section("weights");
  w.numbers("grid", c.grid.values);
  w.get("max_passes", c.grid.max_passes);
  w.check_unknown();

  Section b = section("bench");
  b.get("seed", c.bench.seed);
  b.get("train_goal_directed", c.bench.train_goal_directed);
  b.get("train_random", c.bench.train_random);
  b.get("dev_questions", c.bench.dev_questions);
  b.get("test_questions", c.bench.test_questions);
  b.get("distractors", c.bench.distractors);
  b.get("target_accuracy", c.bench.target_accuracy);
  b.check_unknown();

  if (c.workers == 0) throw ValidationError("config: workers must be at least 1");
  c.grid.validate();
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  CliConfig c = parse_config(core::read_file(path), path.parent_path());
  c.source = path;
  return c;
}

void validate_scorer(const ScorerSettings& s, std::string_view role) {
  const std::string r(role);
  neural::parse_normalization(s.normalization);
  if (s.kind == "mock") {
    if (s.table.empty()) throw ValidationError(r + ": kind=mock needs a score table file");
  } else if (s.kind == "external") {
    if (s.http.endpoint.empty()) throw ValidationError(r + ": kind=external needs an endpoint");
  } else if (s.kind == "replay") {
    if (s.replay.empty()) throw ValidationError(r + ": kind=replay needs a transcript file");
  } else {
    throw ValidationError(r + ": unknown kind '" + s.kind + "' (expected mock, external or replay)");
  }
}

void validate_llm(const LlmSettings& s) {
  if (s.kind == "scripted") {
    if (s.script.empty()) throw ValidationError("llm: kind=scripted needs a script file");
  } else if (s.kind == "external") {
    if (s.chat.endpoint.empty()) throw ValidationError("llm: kind=external needs an endpoint");
    if (s.chat.model.empty()) throw ValidationError("llm: kind=external needs a model name");
  } else {
    throw ValidationError("llm: unknown kind '" + s.kind + "' (expected scripted or external)");
  }
}

}  // namespace rulefuse::cli
