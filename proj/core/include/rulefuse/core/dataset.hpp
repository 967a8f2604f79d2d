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

// JSON Lines readers and writers.
//
// Question records:
//   {"id", "task", "history": [{"action","observation","reward"}], "action",
//    "candidates": [{"next_state","reward"}], "gold_index", "category"}
//
// Transition-step records (training trajectories):
//   {"trajectory_id", "step_index", "task", "history", "action",
//    "next_state", "reward"}
//
// Unknown keys are ignored on load. Beliefs are re-rendered on load with the
// given template, so save/load round-trips whenever the same template is used.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rulefuse/core/belief.hpp"
#include "rulefuse/core/types.hpp"

namespace rulefuse::core {

std::vector<ChoiceQuestion> parse_questions(std::string_view jsonl, const std::string& template_id = "toy",
                                            const TemplateRegistry& registry = default_templates());
std::string format_questions(const std::vector<ChoiceQuestion>& questions);

// Throws FormatError (with line number) or IoError.
std::vector<ChoiceQuestion> dataset_load(const std::filesystem::path& path, const std::string& template_id = "toy",
                                         const TemplateRegistry& registry = default_templates());
void dataset_save(const std::filesystem::path& path, const std::vector<ChoiceQuestion>& questions);

std::vector<TransitionStep> parse_steps(std::string_view jsonl, const std::string& template_id = "toy",
                                        const TemplateRegistry& registry = default_templates());
std::string format_steps(const std::vector<TransitionStep>& steps);
std::vector<TransitionStep> steps_load(const std::filesystem::path& path, const std::string& template_id = "toy",
                                       const TemplateRegistry& registry = default_templates());
void steps_save(const std::filesystem::path& path, const std::vector<TransitionStep>& steps);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling then renames, so readers never observe a
// partially written file.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rulefuse::core
