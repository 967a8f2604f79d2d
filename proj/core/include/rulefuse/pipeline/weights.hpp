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

// Coordinate-descent weight learning on a development set.

#pragma once

#include <cstddef>
#include <vector>

#include "rulefuse/symbolic/ruleset.hpp"
#include "rulefuse/synergy/combine.hpp"

namespace rulefuse::pipeline {

struct WeightGrid {
  std::vector<double> values = {0.0, 0.25, 0.5, 1.0, 2.0};
  std::size_t max_passes = 5;

  // Throws ValidationError for an empty grid or a negative value.
  void validate() const;
};

struct LearnResult {
  symbolic::WeightedRuleSet ruleset;
  std::size_t correct_before = 0;
  std::size_t correct_after = 0;
  std::size_t passes = 0;
  std::size_t evaluations = 0;
};

// Visits rules in order; each weight moves to the grid value with the best
// dev accuracy, the current value winning ties. Stops after a pass without
// change or after max_passes. The result's version is one higher. Throws
// ValidationError for an empty rule set.
LearnResult learn_weights(const symbolic::WeightedRuleSet& ruleset, synergy::EvaluationCache& dev,
                          const WeightGrid& grid = {});

}  // namespace rulefuse::pipeline
