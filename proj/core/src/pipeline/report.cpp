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

#include "rulefuse/pipeline/report.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/parallel.hpp"
#include "rulefuse/core/text.hpp"

namespace rulefuse::pipeline {

using nlohmann::json;

RunReport summarize(const std::vector<core::EvalOutcome>& outcomes, std::string phase) {
  RunReport r;
  r.phase = std::move(phase);
  for (const auto& o : outcomes) {
    auto& cat = r.categories[o.category.empty() ? "uncategorized" : o.category];
    ++cat.total;
    ++r.overall.total;
    if (o.correct) {
      ++cat.correct;
      ++r.overall.correct;
    }
    if (o.tie) ++r.ties;
    r.incidents += o.incidents;
  }
  return r;
}

std::vector<core::EvalOutcome> predict_dataset(const synergy::PredictorConfig& config,
                                               const std::vector<core::ChoiceQuestion>& dataset, std::size_t workers) {
  const bool needs_rules = config.mode != synergy::PredictorMode::kNeural;
  if (needs_rules && !config.ruleset) throw ValidationError("predictor '" + config.id + "' needs a rule set");
  const bool needs_scorer = config.mode != synergy::PredictorMode::kSymbolic;
  if (needs_scorer && !config.scorer.scorer) throw ValidationError("predictor '" + config.id + "' needs a scorer");

  switch (config.mode) {
    case synergy::PredictorMode::kCombined:
      return synergy::combined_predict_batch(config.scorer, *config.ruleset, config.policy, dataset, workers);
    case synergy::PredictorMode::kNeural: {
      const auto scores = neural::score_batch(config.scorer, dataset, workers);
      std::vector<core::EvalOutcome> out(dataset.size());
      for (std::size_t i = 0; i < dataset.size(); ++i) out[i] = neural::neural_outcome(dataset[i], scores[i]);
      return out;
    }
    case synergy::PredictorMode::kSymbolic: {
      std::vector<core::EvalOutcome> out(dataset.size());
      core::parallel_for(dataset.size(), workers,
                         [&](std::size_t i) { out[i] = symbolic::symbolic_outcome(*config.ruleset, dataset[i]); });
      return out;
    }
  }
  return {};
}

RunReport evaluate(const std::vector<core::ChoiceQuestion>& dataset, const synergy::PredictorConfig& config,
                   std::size_t workers) {
  RunReport r = summarize(predict_dataset(config, dataset, workers));
  r.predictor = std::string(synergy::predictor_mode_name(config.mode));
  if (config.mode != synergy::PredictorMode::kNeural) {
    r.ruleset_version = config.ruleset->version();
    r.rule_count = config.ruleset->size();
  }
  if (config.mode == synergy::PredictorMode::kCombined) r.gamma = config.policy.describe();
  if (config.mode != synergy::PredictorMode::kSymbolic)
    r.normalization = std::string(neural::normalization_name(config.scorer.normalization));
  return r;
}

namespace {

json stats_json(const CategoryStats& s) {
  return {{"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy()}};
}

CategoryStats stats_from(const json& j) {
  CategoryStats s;
  s.correct = j.at("correct").get<std::size_t>();
  s.total = j.at("total").get<std::size_t>();
  return s;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json cats = json::object();
  for (const auto& [name, s] : r.categories) cats[name] = stats_json(s);
  json j = {{"phase", r.phase},
            {"predictor", r.predictor},
            {"categories", cats},
            {"overall", stats_json(r.overall)},
            {"ties", r.ties},
            {"incidents", r.incidents},
            {"ruleset_version", r.ruleset_version},
            {"rule_count", r.rule_count},
            {"gamma", r.gamma},
            {"normalization", r.normalization},
            {"settings", r.settings},
            {"notes", r.notes}};
  j["data_fraction"] = r.data_fraction ? json(*r.data_fraction) : json(nullptr);
  return j.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunReport r;
    r.phase = j.at("phase").get<std::string>();
    r.predictor = j.value("predictor", "");
    for (const auto& [name, s] : j.at("categories").items()) r.categories[name] = stats_from(s);
    r.overall = stats_from(j.at("overall"));
    r.ties = j.value("ties", std::size_t{0});
    r.incidents = j.value("incidents", std::size_t{0});
    r.ruleset_version = j.value("ruleset_version", std::uint64_t{0});
    r.rule_count = j.value("rule_count", std::size_t{0});
    r.gamma = j.value("gamma", "");
    r.normalization = j.value("normalization", "");
    if (j.contains("settings")) r.settings = j.at("settings").get<std::map<std::string, std::string>>();
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("data_fraction") && !j.at("data_fraction").is_null())
      r.data_fraction = j.at("data_fraction").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::string render_report_table(const std::vector<RunReport>& reports) {
  std::set<std::string> names;
  for (const auto& r : reports)
    for (const auto& [name, s] : r.categories) names.insert(name);

  std::vector<std::string> header = {"category"};
  for (const auto& r : reports) header.push_back(r.predictor.empty() ? r.phase : r.phase + "/" + r.predictor);
  std::vector<std::vector<std::string>> rows;
  auto cell = [](const CategoryStats& s) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f (%zu/%zu)", s.accuracy(), s.correct, s.total);
    return std::string(buf);
  };
  for (const auto& name : names) {
    std::vector<std::string> row = {name};
    for (const auto& r : reports) {
      auto it = r.categories.find(name);
      row.push_back(it == r.categories.end() ? "-" : cell(it->second));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::string> avg = {"average"};
  for (const auto& r : reports) avg.push_back(cell(r.overall));
  rows.push_back(std::move(avg));

  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  };
  widen(header);
  for (const auto& row : rows) widen(row);
  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t c = 0; c < row.size(); ++c) {
      s += c == 0 ? "" : "  ";
      s += row[c];
      if (c + 1 < row.size()) s.append(width[c] - row[c].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = line(header);
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string outcomes_to_jsonl(const std::vector<core::EvalOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) {
    json j = {{"id", o.question_id},   {"category", o.category}, {"chosen", o.chosen_index},
              {"gold", o.gold_index},  {"correct", o.correct},   {"tie", o.tie},
              {"gamma", o.gamma},      {"scores", o.per_candidate_scores},
              {"energies", o.energies}, {"incidents", o.incidents}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace rulefuse::pipeline
