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

// Error cases collected from wrong predictions, and their clustering.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rulefuse/core/types.hpp"

namespace rulefuse::induction {

enum class CaseField { kQuestion, kCorrectAnswer, kWrongAnswer, kAction, kTaskName };
inline constexpr CaseField kAllCaseFields[] = {CaseField::kQuestion, CaseField::kCorrectAnswer,
                                               CaseField::kWrongAnswer, CaseField::kAction, CaseField::kTaskName};
std::string_view case_field_name(CaseField field);

struct ErrorCase {
  std::string question_id;
  // Rendered belief followed by the action line, as the scorer saw it.
  std::string question;
  std::string correct_answer;
  std::string wrong_answer;
  std::string action;
  std::string task_name;
  std::size_t gold_index = 0;
  std::size_t chosen_index = 0;

  const std::string& field(CaseField f) const;
};

// One case per incorrect outcome, in outcome order. Outcomes must name
// questions present in `dataset`; throws ValidationError otherwise.
std::vector<ErrorCase> collect_errors(const std::vector<core::EvalOutcome>& outcomes,
                                      const std::vector<core::ChoiceQuestion>& dataset);

ErrorCase make_case(const core::ChoiceQuestion& question, std::size_t chosen_index);

// Numbered block used in prompts:
//   --- case N ---
//   Question: ...  Correct answer: ...  Wrongly selected answer: ...
std::string serialize_case(const ErrorCase& c, std::size_t number);
std::string serialize_cases(const std::vector<ErrorCase>& cases);

}  // namespace rulefuse::induction
