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

// Prompt templates for rule proposal and reflection, and reply parsing.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rulefuse/induction/cases.hpp"
#include "rulefuse/induction/optics.hpp"

namespace rulefuse::induction {

inline constexpr std::string_view kRuleMarker = "### Rule ###";
inline constexpr std::string_view kProgramMarker = "### Program ###";

// `induction` may use {cases}; `reflection` may use {rule_description},
// {current_rule} and {negative_impacted_cases}.
struct PromptTemplate {
  std::string id;
  std::string induction;
  std::string reflection;
};

// Built-in templates: "generic" and "toy". Throws ValidationError otherwise.
const PromptTemplate& builtin_template(const std::string& id);
std::vector<std::string> builtin_template_ids();
// Reads <dir>/induction.txt and <dir>/reflection.txt; placeholders are
// checked as for the built-ins.
PromptTemplate load_template(const std::filesystem::path& dir, const std::string& id);
// Throws ValidationError when a template uses an unknown placeholder or lacks
// a required one.
void validate_template(const PromptTemplate& tmpl);

// Serialises every member case of the cluster, in member order.
std::string build_induction_prompt(const Cluster& cluster, const std::vector<ErrorCase>& cases,
                                   const PromptTemplate& tmpl);
std::string build_reflection_prompt(const std::string& description, const std::string& source,
                                    const std::vector<ErrorCase>& broken, const PromptTemplate& tmpl);

struct ParsedReply {
  bool ok = false;
  std::string description;
  std::string source;
  // Why parsing failed; DSL errors keep their "line:column" prefix.
  std::string diagnostics;
};

// Description = text between the rule and program markers; source = text
// after the program marker with any code fence removed. The source must
// parse as a rule.
ParsedReply parse_rule_reply(std::string_view reply);
std::string format_rule_reply(const std::string& description, const std::string& source);

}  // namespace rulefuse::induction
