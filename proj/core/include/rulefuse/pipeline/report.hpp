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

// Accuracy reports.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rulefuse/core/types.hpp"
#include "rulefuse/synergy/combine.hpp"

namespace rulefuse::pipeline {

struct CategoryStats {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct RunReport {
  std::string phase;
  std::string predictor;
  std::map<std::string, CategoryStats> categories;
  CategoryStats overall;
  std::size_t ties = 0;
  std::size_t incidents = 0;
  std::uint64_t ruleset_version = 0;
  std::size_t rule_count = 0;
  std::string gamma;
  std::string normalization;
  // Fraction of training steps kept by data selection (Phase 2 only).
  std::optional<double> data_fraction;
  std::map<std::string, std::string> settings;
  std::vector<std::string> notes;
};

RunReport summarize(const std::vector<core::EvalOutcome>& outcomes, std::string phase = "eval");

// Runs one predictor over a dataset.
std::vector<core::EvalOutcome> predict_dataset(const synergy::PredictorConfig& config,
                                               const std::vector<core::ChoiceQuestion>& dataset,
                                               std::size_t workers = 1);
RunReport evaluate(const std::vector<core::ChoiceQuestion>& dataset, const synergy::PredictorConfig& config,
                   std::size_t workers = 1);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view json);
// Category table with one row per category plus the average.
std::string render_report_table(const std::vector<RunReport>& reports);

// One JSON line per question: id, category, chosen, gold, correct, tie,
// gamma, scores, energies.
std::string outcomes_to_jsonl(const std::vector<core::EvalOutcome>& outcomes);

}  // namespace rulefuse::pipeline
