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

#include "rulefuse/core/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::core {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing key '") + key + "'", line);
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_string()) throw FormatError(std::string("key '") + key + "' must be a string", line);
  return v.get<std::string>();
}

double require_finite(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number()) throw FormatError(std::string("key '") + key + "' must be a number", line);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(std::string("key '") + key + "' must be finite", line);
  return d;
}

std::size_t require_index(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw FormatError(std::string("key '") + key + "' must be a non-negative integer", line);
  }
  return v.get<std::size_t>();
}

std::vector<HistoryEntry> parse_history(const json& obj, std::size_t line) {
  const json& arr = require(obj, "history", line);
  if (!arr.is_array()) throw FormatError("key 'history' must be an array", line);
  std::vector<HistoryEntry> out;
  for (const json& e : arr) {
    if (!e.is_object()) throw FormatError("history entries must be objects", line);
    out.push_back({require_string(e, "action", line), require_string(e, "observation", line),
                   require_finite(e, "reward", line)});
  }
  return out;
}

json history_json(const std::vector<HistoryEntry>& history) {
  json arr = json::array();
  for (const auto& e : history) arr.push_back({{"action", e.action}, {"observation", e.observation}, {"reward", e.reward}});
  return arr;
}

// Calls fn(object, line_number) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view jsonl, Fn&& fn) {
  std::size_t line_no = 0;
  for (const std::string& raw : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(raw).empty()) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw FormatError("record must be a JSON object", line_no);
    fn(obj, line_no);
  }
}

template <typename Fn>
auto with_line(std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(e.what(), line);
  }
}

}  // namespace

std::vector<ChoiceQuestion> parse_questions(std::string_view jsonl, const std::string& template_id,
                                            const TemplateRegistry& registry) {
  const EnvTemplate& tmpl = registry.get(template_id);
  std::vector<ChoiceQuestion> out;
  std::set<std::string> ids;
  for_each_record(jsonl, [&](const json& obj, std::size_t line) {
    ChoiceQuestion q;
    q.id = require_string(obj, "id", line);
    if (!ids.insert(q.id).second) throw FormatError("duplicate question id '" + q.id + "'", line);
    const std::string task = require_string(obj, "task", line);
    auto history = parse_history(obj, line);
    const std::string action = require_string(obj, "action", line);
    const json& cands = require(obj, "candidates", line);
    if (!cands.is_array()) throw FormatError("key 'candidates' must be an array", line);
    for (const json& c : cands) {
      if (!c.is_object()) throw FormatError("candidates must be objects", line);
      q.candidates.push_back({require_string(c, "next_state", line), require_finite(c, "reward", line)});
    }
    q.gold_index = require_index(obj, "gold_index", line);
    q.category = obj.contains("category") ? require_string(obj, "category", line) : std::string();
    with_line(line, [&] {
      q.belief = render_belief(task, std::move(history), tmpl);
      q.action = ActionText(action);
      validate_question(q);
      return 0;
    });
    out.push_back(std::move(q));
  });
  return out;
}

std::string format_questions(const std::vector<ChoiceQuestion>& questions) {
  std::string out;
  for (const auto& q : questions) {
    json cands = json::array();
    for (const auto& c : q.candidates) cands.push_back({{"next_state", c.next_state}, {"reward", c.reward}});
    json obj = {{"id", q.id},
                {"task", q.belief.task_description},
                {"history", history_json(q.belief.history)},
                {"action", q.action.value()},
                {"candidates", std::move(cands)},
                {"gold_index", q.gold_index},
                {"category", q.category}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<ChoiceQuestion> dataset_load(const std::filesystem::path& path, const std::string& template_id,
                                         const TemplateRegistry& registry) {
  return parse_questions(read_file(path), template_id, registry);
}

void dataset_save(const std::filesystem::path& path, const std::vector<ChoiceQuestion>& questions) {
  write_file(path, format_questions(questions));
}

std::vector<TransitionStep> parse_steps(std::string_view jsonl, const std::string& template_id,
                                        const TemplateRegistry& registry) {
  const EnvTemplate& tmpl = registry.get(template_id);
  std::vector<TransitionStep> out;
  for_each_record(jsonl, [&](const json& obj, std::size_t line) {
    TransitionStep s;
    s.trajectory_id = require_string(obj, "trajectory_id", line);
    s.step_index = require_index(obj, "step_index", line);
    const std::string task = require_string(obj, "task", line);
    auto history = parse_history(obj, line);
    const std::string action = require_string(obj, "action", line);
    s.next_state = require_string(obj, "next_state", line);
    s.reward = require_finite(obj, "reward", line);
    with_line(line, [&] {
      s.belief = render_belief(task, std::move(history), tmpl);
      s.action = ActionText(action);
      return 0;
    });
    out.push_back(std::move(s));
  });
  validate_step_order(out);
  return out;
}

std::string format_steps(const std::vector<TransitionStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    json obj = {{"trajectory_id", s.trajectory_id},
                {"step_index", s.step_index},
                {"task", s.belief.task_description},
                {"history", history_json(s.belief.history)},
                {"action", s.action.value()},
                {"next_state", s.next_state},
                {"reward", s.reward}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<TransitionStep> steps_load(const std::filesystem::path& path, const std::string& template_id,
                                       const TemplateRegistry& registry) {
  return parse_steps(read_file(path), template_id, registry);
}

void steps_save(const std::filesystem::path& path, const std::vector<TransitionStep>& steps) {
  write_file(path, format_steps(steps));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace rulefuse::core
