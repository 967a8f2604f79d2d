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

#include "rulefuse/induction/cases.hpp"

#include <map>

#include "rulefuse/core/error.hpp"
#include "rulefuse/neural/scorer.hpp"

namespace rulefuse::induction {

std::string_view case_field_name(CaseField field) {
  switch (field) {
    case CaseField::kQuestion: return "question";
    case CaseField::kCorrectAnswer: return "correct_answer";
    case CaseField::kWrongAnswer: return "wrong_answer";
    case CaseField::kAction: return "action";
    case CaseField::kTaskName: return "task_name";
  }
  return "?";
}

const std::string& ErrorCase::field(CaseField f) const {
  switch (f) {
    case CaseField::kQuestion: return question;
    case CaseField::kCorrectAnswer: return correct_answer;
    case CaseField::kWrongAnswer: return wrong_answer;
    case CaseField::kAction: return action;
    case CaseField::kTaskName: return task_name;
  }
  return question;
}

ErrorCase make_case(const core::ChoiceQuestion& q, std::size_t chosen_index) {
  if (chosen_index >= q.size()) throw ValidationError("question '" + q.id + "': chosen index out of range");
  if (chosen_index == q.gold_index) throw ValidationError("question '" + q.id + "': not an error");
  ErrorCase c;
  c.question_id = q.id;
  c.question = neural::scoring_context(q.belief, q.action);
  c.correct_answer = core::candidate_text(q.candidates[q.gold_index]);
  c.wrong_answer = core::candidate_text(q.candidates[chosen_index]);
  c.action = q.action.value();
  c.task_name = q.belief.task_description;
  c.gold_index = q.gold_index;
  c.chosen_index = chosen_index;
  return c;
}

std::vector<ErrorCase> collect_errors(const std::vector<core::EvalOutcome>& outcomes,
                                      const std::vector<core::ChoiceQuestion>& dataset) {
  std::map<std::string, const core::ChoiceQuestion*> by_id;
  for (const auto& q : dataset) by_id[q.id] = &q;
  std::vector<ErrorCase> out;
  for (const auto& o : outcomes) {
    const auto it = by_id.find(o.question_id);
    if (it == by_id.end()) throw ValidationError("outcome for unknown question '" + o.question_id + "'");
    if (o.gold_index != it->second->gold_index) {
      throw ValidationError("outcome for '" + o.question_id + "' disagrees with the dataset gold index");
    }
    if (!o.correct) out.push_back(make_case(*it->second, o.chosen_index));
  }
  return out;
}

std::string serialize_case(const ErrorCase& c, std::size_t number) {
  return "--- case " + std::to_string(number) + " ---\nQuestion:\n" + c.question +
         "\nCorrect answer:\n" + c.correct_answer + "\nWrongly selected answer:\n" + c.wrong_answer + "\n";
}

std::string serialize_cases(const std::vector<ErrorCase>& cases) {
  std::string out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (i) out += "\n";
    out += serialize_case(cases[i], i + 1);
  }
  return out;
}

}  // namespace rulefuse::induction
