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

#include "rulefuse/induction/prompts.hpp"

#include <map>
#include <set>

#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"
#include "rulefuse/dsl/rule.hpp"

namespace rulefuse::induction {

namespace {

const std::map<std::string, std::string>& embedded_files() {
  static const std::map<std::string, std::string> files = {
#include "rulefuse_templates.inc"
  };
  return files;
}

const std::map<std::string, PromptTemplate>& builtins() {
  static const std::map<std::string, PromptTemplate> templates = [] {
    std::map<std::string, PromptTemplate> out;
    const auto& files = embedded_files();
    for (const auto& [name, body] : files) {
      constexpr std::string_view kPrefix = "induction_";
      if (!text::starts_with(name, kPrefix)) continue;
      const std::string id = name.substr(kPrefix.size());
      const auto refl = files.find("reflection_" + id);
      if (refl == files.end()) continue;
      PromptTemplate t{id, body, refl->second};
      validate_template(t);
      out.emplace(id, std::move(t));
    }
    return out;
  }();
  return templates;
}

void check_placeholders(const std::string& id, const std::string& which, const std::string& body,
                        const std::set<std::string>& allowed, const std::set<std::string>& required) {
  std::set<std::string> found;
  for (const auto& name : text::unresolved_placeholders(body)) {
    if (!allowed.count(name)) {
      throw ValidationError("template '" + id + "' (" + which + "): unknown placeholder {" + name + "}");
    }
    found.insert(name);
  }
  for (const auto& name : required) {
    if (!found.count(name)) {
      throw ValidationError("template '" + id + "' (" + which + "): missing placeholder {" + name + "}");
    }
  }
}

std::string strip_fence(std::string_view s) {
  std::vector<std::string> lines = text::split_lines(s);
  std::vector<std::string> kept;
  for (auto& line : lines) {
    if (text::starts_with(text::trim(line), "```")) continue;
    kept.push_back(std::move(line));
  }
  return std::string(text::trim(text::join(kept, "\n")));
}

}  // namespace

void validate_template(const PromptTemplate& tmpl) {
  check_placeholders(tmpl.id, "induction", tmpl.induction, {"cases"}, {"cases"});
  check_placeholders(tmpl.id, "reflection", tmpl.reflection,
                     {"rule_description", "current_rule", "negative_impacted_cases"},
                     {"current_rule", "negative_impacted_cases"});
}

const PromptTemplate& builtin_template(const std::string& id) {
  const auto& all = builtins();
  const auto it = all.find(id);
  if (it == all.end()) throw ValidationError("unknown prompt template '" + id + "'");
  return it->second;
}

std::vector<std::string> builtin_template_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : builtins()) ids.push_back(id);
  return ids;
}

PromptTemplate load_template(const std::filesystem::path& dir, const std::string& id) {
  PromptTemplate t{id, core::read_file(dir / "induction.txt"), core::read_file(dir / "reflection.txt")};
  validate_template(t);
  return t;
}

std::string build_induction_prompt(const Cluster& cluster, const std::vector<ErrorCase>& cases,
                                   const PromptTemplate& tmpl) {
  std::vector<ErrorCase> members;
  for (const std::size_t i : cluster.members) {
    if (i >= cases.size()) throw ValidationError("cluster member out of range");
    members.push_back(cases[i]);
  }
  return text::substitute(tmpl.induction, {{"cases", serialize_cases(members)}});
}

std::string build_reflection_prompt(const std::string& description, const std::string& source,
                                    const std::vector<ErrorCase>& broken, const PromptTemplate& tmpl) {
  return text::substitute(tmpl.reflection, {{"rule_description", description},
                                            {"current_rule", source},
                                            {"negative_impacted_cases", serialize_cases(broken)}});
}

ParsedReply parse_rule_reply(std::string_view reply) {
  ParsedReply out;
  const std::size_t rule = reply.find(kRuleMarker);
  if (rule == std::string_view::npos) {
    out.diagnostics = "reply has no \"" + std::string(kRuleMarker) + "\" section";
    return out;
  }
  const std::size_t program = reply.find(kProgramMarker, rule + kRuleMarker.size());
  if (program == std::string_view::npos) {
    out.diagnostics = "reply has no \"" + std::string(kProgramMarker) + "\" section after the rule";
    return out;
  }
  out.description =
      std::string(text::trim(reply.substr(rule + kRuleMarker.size(), program - rule - kRuleMarker.size())));
  out.source = strip_fence(reply.substr(program + kProgramMarker.size()));
  if (out.source.empty()) {
    out.diagnostics = "program section is empty";
    return out;
  }
  try {
    dsl::parse_rule(out.source);
  } catch (const dsl::ParseError& e) {
    out.diagnostics = e.what();
    return out;
  }
  out.ok = true;
  return out;
}

std::string format_rule_reply(const std::string& description, const std::string& source) {
  return std::string(kRuleMarker) + "\n" + description + "\n" + std::string(kProgramMarker) + "\n" + source + "\n";
}

}  // namespace rulefuse::induction
