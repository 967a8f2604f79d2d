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

#include "rulefuse/pipeline/weights.hpp"

#include <cmath>

#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::pipeline {

void WeightGrid::validate() const {
  if (values.empty()) throw ValidationError("weight grid is empty");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("weight grid value " + text::format_number(v) + " is invalid");
  if (max_passes == 0) throw ValidationError("weight grid needs at least one pass");
}

namespace {

std::size_t count_correct(const std::vector<core::EvalOutcome>& outcomes) {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.correct ? 1 : 0;
  return n;
}

}  // namespace

LearnResult learn_weights(const symbolic::WeightedRuleSet& ruleset, synergy::EvaluationCache& dev,
                          const WeightGrid& grid) {
  grid.validate();
  if (ruleset.empty()) throw ValidationError("learn_weights: rule set is empty");
  std::vector<std::shared_ptr<const synergy::EvaluationCache::Column>> columns;
  columns.reserve(ruleset.size());
  for (const auto& rule : ruleset.rules()) columns.push_back(dev.column(rule));

  std::vector<double> weights = ruleset.weights();
  LearnResult result;
  std::size_t current = count_correct(dev.evaluate(columns, weights));
  result.correct_before = current;
  ++result.evaluations;

  for (std::size_t pass = 0; pass < grid.max_passes && !weights.empty(); ++pass) {
    ++result.passes;
    bool changed = false;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double original = weights[j];
      double best = original;
      std::size_t best_correct = current;
      for (double v : grid.values) {
        if (v == original) continue;
        weights[j] = v;
        const std::size_t c = count_correct(dev.evaluate(columns, weights));
        ++result.evaluations;
        if (c > best_correct) {
          best = v;
          best_correct = c;
        }
      }
      weights[j] = best;
      if (best != original) {
        changed = true;
        current = best_correct;
      }
    }
    if (!changed) break;
  }
  result.correct_after = current;
  result.ruleset = ruleset.with_weights(weights);
  return result;
}

}  // namespace rulefuse::pipeline
