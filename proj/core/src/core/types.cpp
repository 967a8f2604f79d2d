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

#include "rulefuse/core/types.hpp"

#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::core {

ActionText::ActionText(std::string value) : value_(std::move(value)) {
  if (text::trim(value_).empty()) throw ValidationError("action text is empty");
}

void validate_question(const ChoiceQuestion& question) {
  const auto& cands = question.candidates;
  if (cands.size() < 2) {
    throw ValidationError("question '" + question.id + "' has " + std::to_string(cands.size()) +
                          " candidates; at least 2 required");
  }
  if (question.gold_index >= cands.size()) {
    throw ValidationError("question '" + question.id + "': gold_index " + std::to_string(question.gold_index) +
                          " out of range [0, " + std::to_string(cands.size()) + ")");
  }
  if (question.action.empty()) throw ValidationError("question '" + question.id + "': empty action");
  std::set<std::pair<std::string, double>> seen;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].next_state.empty()) {
      throw ValidationError("question '" + question.id + "': candidate " + std::to_string(i) + " has empty next_state");
    }
    if (!std::isfinite(cands[i].reward)) {
      throw ValidationError("question '" + question.id + "': candidate " + std::to_string(i) +
                            " has non-finite reward");
    }
    if (!seen.emplace(cands[i].next_state, cands[i].reward).second) {
      throw ValidationError("question '" + question.id + "': duplicate candidate at index " + std::to_string(i));
    }
  }
}

void validate_step_order(const std::vector<TransitionStep>& steps) {
  std::map<std::string, std::size_t> last;
  for (const auto& step : steps) {
    auto [it, inserted] = last.emplace(step.trajectory_id, step.step_index);
    if (inserted) continue;
    if (step.step_index <= it->second) {
      throw ValidationError("trajectory '" + step.trajectory_id + "': step_index " + std::to_string(step.step_index) +
                            " does not increase");
    }
    it->second = step.step_index;
  }
}

std::string candidate_text(const Candidate& candidate) {
  return candidate.next_state + "\nreward: " + text::format_number(candidate.reward);
}

ArgMax argmax(const std::vector<double>& values) {
  ArgMax out;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[out.index]) out.index = i;
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != out.index && values[i] == values[out.index]) out.tie = true;
  }
  return out;
}

}  // namespace rulefuse::core
