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

#include "rulefuse/pipeline/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/core/text.hpp"
#include "rulefuse/neural/scorer.hpp"

namespace rulefuse::pipeline {

using nlohmann::json;

std::string step_id(const core::TransitionStep& step) {
  return step.trajectory_id + "#" + std::to_string(step.step_index);
}

std::size_t SelectionPlan::selected_count() const {
  return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
}

double SelectionPlan::selected_fraction() const {
  return total_steps ? static_cast<double>(selected_count()) / static_cast<double>(total_steps) : 0.0;
}

namespace {

// pi_i = min(1, c * w_i) with sum pi = target (target < count).
std::vector<double> inclusion_probabilities(const std::vector<double>& w, double target) {
  std::vector<double> pi(w.size(), 0.0);
  std::vector<bool> capped(w.size(), false);
  std::size_t ncapped = 0;
  for (;;) {
    double free_weight = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!capped[i]) free_weight += w[i];
    const double c = (target - static_cast<double>(ncapped)) / free_weight;
    bool changed = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (capped[i]) continue;
      if (c * w[i] >= 1.0) {
        capped[i] = true;
        ++ncapped;
        changed = true;
      }
    }
    if (!changed) {
      for (std::size_t i = 0; i < w.size(); ++i) pi[i] = capped[i] ? 1.0 : c * w[i];
      return pi;
    }
  }
}

}  // namespace

SelectionPlan select_by_coverage(const std::vector<std::string>& ids, const std::vector<std::size_t>& k,
                                 double budget_fraction, std::uint64_t seed) {
  if (ids.size() != k.size()) throw ValidationError("selection: ids and coverage counts differ in length");
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0))
    throw ValidationError("selection: budget fraction must be in (0, 1], got " + text::format_number(budget_fraction));

  SelectionPlan plan;
  plan.budget_fraction = budget_fraction;
  plan.seed = seed;
  plan.total_steps = ids.size();
  plan.step_ids = ids;
  plan.k = k;
  plan.inclusion_probability.assign(ids.size(), 0.0);
  plan.selected.assign(ids.size(), false);

  std::vector<std::size_t> covered;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (k[i] == 0) {
      plan.inclusion_probability[i] = 1.0;
      plan.selected[i] = true;
    } else {
      covered.push_back(i);
    }
  }
  const std::size_t mandatory = ids.size() - covered.size();
  const auto target = static_cast<std::size_t>(std::llround(budget_fraction * static_cast<double>(ids.size())));
  if (mandatory > target) {
    plan.warning = "uncovered steps (" + std::to_string(mandatory) + ") exceed the budget (" +
                   std::to_string(target) + "); keeping only uncovered steps";
  }
  const std::size_t extra = target > mandatory ? target - mandatory : 0;

  if (extra >= covered.size()) {
    for (std::size_t i : covered) {
      plan.inclusion_probability[i] = 1.0;
      plan.selected[i] = true;
    }
  } else if (extra > 0) {
    std::vector<double> w;
    w.reserve(covered.size());
    for (std::size_t i : covered) w.push_back(1.0 / static_cast<double>(k[i]));
    const auto pi = inclusion_probabilities(w, static_cast<double>(extra));
    for (std::size_t j = 0; j < covered.size(); ++j) plan.inclusion_probability[covered[j]] = pi[j];

    core::Rng rng(seed);
    std::vector<std::size_t> order(covered.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const double u = rng.unit();

    // Certain items are taken directly; the rest share the systematic grid.
    long double cum = 0.0L;
    for (std::size_t j : order) {
      if (pi[j] >= 1.0) {
        plan.selected[covered[j]] = true;
        continue;
      }
      const long double before = cum;
      cum += pi[j];
      if (std::ceil(cum - u) - std::ceil(before - u) > 0) plan.selected[covered[j]] = true;
    }
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!plan.selected[i]) continue;
    (k[i] == 0 ? plan.mandatory : plan.sampled).push_back(ids[i]);
  }
  return plan;
}

SelectionPlan select_training_data(const std::vector<core::TransitionStep>& trainset,
                                   const symbolic::WeightedRuleSet& ruleset, double budget_fraction,
                                   std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<std::size_t> k;
  ids.reserve(trainset.size());
  k.reserve(trainset.size());
  for (const auto& step : trainset) {
    ids.push_back(step_id(step));
    k.push_back(symbolic::active_rule_count(ruleset, step));
  }
  return select_by_coverage(ids, k, budget_fraction, seed);
}

std::string plan_to_json(const SelectionPlan& plan) {
  json steps = json::array();
  for (std::size_t i = 0; i < plan.step_ids.size(); ++i) {
    steps.push_back({{"id", plan.step_ids[i]},
                     {"k", plan.k[i]},
                     {"inclusion_probability", plan.inclusion_probability[i]},
                     {"selected", static_cast<bool>(plan.selected[i])}});
  }
  json j = {{"budget_fraction", plan.budget_fraction},
            {"seed", plan.seed},
            {"total_steps", plan.total_steps},
            {"selected_count", plan.selected_count()},
            {"mandatory_count", plan.mandatory.size()},
            {"sampled_count", plan.sampled.size()},
            {"warning", plan.warning},
            {"steps", steps}};
  return j.dump(2) + "\n";
}

SelectionPlan plan_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SelectionPlan plan;
    plan.budget_fraction = j.at("budget_fraction").get<double>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.total_steps = j.at("total_steps").get<std::size_t>();
    plan.warning = j.value("warning", "");
    for (const auto& s : j.at("steps")) {
      plan.step_ids.push_back(s.at("id").get<std::string>());
      plan.k.push_back(s.at("k").get<std::size_t>());
      plan.inclusion_probability.push_back(s.at("inclusion_probability").get<double>());
      const bool sel = s.at("selected").get<bool>();
      plan.selected.push_back(sel);
      if (sel) (plan.k.back() == 0 ? plan.mandatory : plan.sampled).push_back(plan.step_ids.back());
    }
    if (plan.step_ids.size() != plan.total_steps) throw FormatError("selection plan: step count mismatch");
    return plan;
  } catch (const json::exception& e) {
    throw FormatError(std::string("selection plan: ") + e.what());
  }
}

std::size_t export_sft_dataset(const SelectionPlan& plan, const std::vector<core::TransitionStep>& trainset,
                               const std::filesystem::path& path) {
  if (plan.step_ids.size() != trainset.size())
    throw ValidationError("sft export: plan covers " + std::to_string(plan.step_ids.size()) + " steps, trainset has " +
                          std::to_string(trainset.size()));
  std::string out;
  std::size_t written = 0;
  for (std::size_t i = 0; i < trainset.size(); ++i) {
    if (!plan.selected[i]) continue;
    const auto& step = trainset[i];
    if (step_id(step) != plan.step_ids[i])
      throw ValidationError("sft export: plan step " + plan.step_ids[i] + " does not match " + step_id(step));
    json j = json::parse(core::format_steps({step}));
    j["input"] = neural::scoring_context(step.belief, step.action);
    j["target"] = {{"next_state", step.next_state}, {"reward", step.reward}};
    out += j.dump();
    out += '\n';
    ++written;
  }
  core::write_file(path, out);
  return written;
}

}  // namespace rulefuse::pipeline
