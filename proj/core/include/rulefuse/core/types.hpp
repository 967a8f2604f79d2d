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
#include <string>
#include <string_view>
#include <vector>

namespace rulefuse::core {

// One (action, observation, reward) triple of interaction history.
struct HistoryEntry {
  std::string action;
  std::string observation;
  double reward = 0.0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

// Textual stand-in for the agent's belief: the goal, a window of recent
// history, and the rendered context string that scorers and rules consume.
// Build it with render_belief(); `rendered` always contains the task text.
struct BeliefState {
  std::string task_description;
  std::vector<HistoryEntry> history;
  std::string rendered;
  std::string template_id;

  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

// Non-empty (after trimming) action string.
class ActionText {
 public:
  ActionText() = default;
  explicit ActionText(std::string value);

  const std::string& value() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const ActionText&, const ActionText&) = default;

 private:
  std::string value_;
};

struct Candidate {
  std::string next_state;
  double reward = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// One recorded (belief, action, next state, reward) tuple of a trajectory.
struct TransitionStep {
  BeliefState belief;
  ActionText action;
  std::string next_state;
  double reward = 0.0;
  std::string trajectory_id;
  std::size_t step_index = 0;

  friend bool operator==(const TransitionStep&, const TransitionStep&) = default;
};

// A multiple-choice world-modeling question.
struct ChoiceQuestion {
  std::string id;
  BeliefState belief;
  ActionText action;
  std::vector<Candidate> candidates;
  std::size_t gold_index = 0;
  std::string category;

  std::size_t size() const noexcept { return candidates.size(); }
  friend bool operator==(const ChoiceQuestion&, const ChoiceQuestion&) = default;
};

// Throws ValidationError unless K >= 2, gold_index < K, candidates are
// pairwise distinct on (next_state, reward), every reward is finite and every
// next_state is non-empty.
void validate_question(const ChoiceQuestion& question);

// Throws ValidationError when step indices are not strictly increasing within
// each trajectory id (steps of one trajectory need not be contiguous).
void validate_step_order(const std::vector<TransitionStep>& steps);

// Result of running one predictor on one question.
struct EvalOutcome {
  std::string question_id;
  std::size_t chosen_index = 0;
  std::size_t gold_index = 0;
  bool correct = false;
  // True when the winning score was shared by more than one candidate and the
  // lowest-index tie-break decided.
  bool tie = false;
  double gamma = 0.0;
  std::vector<double> per_candidate_scores;
  std::vector<double> energies;
  std::size_t incidents = 0;
  std::string category;

  friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;
};

// Index of the largest value; ties go to the lowest index. `tie` reports
// whether another index shares the maximum. Empty input yields index 0.
struct ArgMax {
  std::size_t index = 0;
  bool tie = false;
};
ArgMax argmax(const std::vector<double>& values);

// Text a scorer sees for a candidate: the next state followed by a reward line.
std::string candidate_text(const Candidate& candidate);

}  // namespace rulefuse::core
