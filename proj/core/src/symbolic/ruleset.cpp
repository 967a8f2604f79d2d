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

#include "rulefuse/symbolic/ruleset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"

namespace rulefuse::symbolic {

using nlohmann::json;

namespace {

void check_weight(const std::string& id, double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw ValidationError("rule '" + id + "': weight must be finite and non-negative");
  }
}

dsl::RuleAst parse_named(const dsl::RuleSource& source) {
  try {
    return dsl::parse_rule(source);
  } catch (const dsl::ParseError& e) {
    throw ValidationError("rule '" + source.id + "': " + e.what());
  }
}

}  // namespace

WeightedRuleSet WeightedRuleSet::make(const std::vector<dsl::RuleSource>& sources, const std::vector<double>& weights,
                                      const std::vector<Provenance>& provenance, std::uint64_t version) {
  if (weights.size() != sources.size()) throw ValidationError("ruleset: weight count does not match rule count");
  if (!provenance.empty() && provenance.size() != sources.size()) {
    throw ValidationError("ruleset: provenance count does not match rule count");
  }
  WeightedRuleSet out;
  out.version_ = version;
  std::set<std::string> ids;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const auto& src = sources[j];
    if (src.id.empty()) throw ValidationError("ruleset: rule " + std::to_string(j) + " has an empty id");
    if (!ids.insert(src.id).second) throw ValidationError("ruleset: duplicate rule id '" + src.id + "'");
    check_weight(src.id, weights[j]);
    out.rules_.push_back({src, parse_named(src), weights[j], provenance.empty() ? Provenance{} : provenance[j]});
  }
  return out;
}

std::vector<double> WeightedRuleSet::weights() const {
  std::vector<double> w;
  w.reserve(rules_.size());
  for (const auto& r : rules_) w.push_back(r.weight);
  return w;
}

bool WeightedRuleSet::contains_id(const std::string& id) const {
  return std::any_of(rules_.begin(), rules_.end(), [&](const WeightedRule& r) { return r.source.id == id; });
}

WeightedRuleSet WeightedRuleSet::with_rule(const dsl::RuleSource& source, double weight, Provenance provenance) const {
  if (source.id.empty()) throw ValidationError("ruleset: rule has an empty id");
  if (contains_id(source.id)) throw ValidationError("ruleset: duplicate rule id '" + source.id + "'");
  check_weight(source.id, weight);
  WeightedRuleSet out = *this;
  out.rules_.push_back({source, parse_named(source), weight, std::move(provenance)});
  ++out.version_;
  return out;
}

WeightedRuleSet WeightedRuleSet::without(const std::vector<std::size_t>& indices) const {
  const std::set<std::size_t> drop(indices.begin(), indices.end());
  WeightedRuleSet out;
  out.version_ = version_ + 1;
  for (std::size_t j = 0; j < rules_.size(); ++j) {
    if (!drop.count(j)) out.rules_.push_back(rules_[j]);
  }
  return out;
}

WeightedRuleSet WeightedRuleSet::with_weights(const std::vector<double>& weights) const {
  if (weights.size() != rules_.size()) throw ValidationError("ruleset: weight count does not match rule count");
  WeightedRuleSet out = *this;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    check_weight(rules_[j].source.id, weights[j]);
    out.rules_[j].weight = weights[j];
  }
  ++out.version_;
  return out;
}

WeightedRuleSet WeightedRuleSet::with_version(std::uint64_t version) const {
  WeightedRuleSet out = *this;
  out.version_ = version;
  return out;
}

bool operator==(const WeightedRuleSet& a, const WeightedRuleSet& b) {
  if (a.version_ != b.version_ || a.rules_.size() != b.rules_.size()) return false;
  for (std::size_t j = 0; j < a.rules_.size(); ++j) {
    const auto& x = a.rules_[j];
    const auto& y = b.rules_[j];
    if (!(x.source == y.source) || x.weight != y.weight || !(x.provenance == y.provenance)) return false;
  }
  return true;
}

dsl::RuleContext rule_context(const core::ChoiceQuestion& question, std::size_t candidate) {
  const auto& c = question.candidates.at(candidate);
  return {question.belief.rendered, question.action.value(), c.next_state, c.reward};
}

dsl::RuleContext rule_context(const core::TransitionStep& step) {
  return {step.belief.rendered, step.action.value(), step.next_state, step.reward};
}

std::vector<double> rule_scores(const WeightedRule& rule, const core::ChoiceQuestion& question,
                                const dsl::EvalBudget& budget, std::vector<Incident>* incidents) {
  std::vector<double> out(question.size(), 0.0);
  for (std::size_t i = 0; i < question.size(); ++i) {
    const dsl::EvalResult r = dsl::eval_rule(rule.ast, rule_context(question, i), budget);
    if (r.ok()) {
      out[i] = r.score;
    } else if (incidents) {
      incidents->push_back({rule.source.id, i, r.status, r.message});
    }
  }
  return out;
}

double energy(const std::vector<double>& row, const std::vector<double>& weights) {
  double e = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) e += weights[j] * row[j];
  return e;
}

EnergyReport score_matrix(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question,
                          const dsl::EvalBudget& budget) {
  EnergyReport report;
  const std::size_t k = question.size();
  const std::size_t m = ruleset.size();
  report.scores.assign(k, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& rule = ruleset.at(j);
    for (std::size_t i = 0; i < k; ++i) {
      const dsl::EvalResult r = dsl::eval_rule(rule.ast, rule_context(question, i), budget);
      report.division_by_zero += r.division_by_zero;
      if (r.ok()) {
        report.scores[i][j] = r.score;
      } else {
        report.incidents.push_back({rule.source.id, i, r.status, r.message});
      }
    }
  }
  const std::vector<double> w = ruleset.weights();
  report.energies.reserve(k);
  for (std::size_t i = 0; i < k; ++i) report.energies.push_back(energy(report.scores[i], w));
  return report;
}

core::EvalOutcome symbolic_outcome(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question,
                                   const dsl::EvalBudget& budget) {
  const EnergyReport report = score_matrix(ruleset, question, budget);
  const core::ArgMax best = core::argmax(report.energies);
  core::EvalOutcome out;
  out.question_id = question.id;
  out.chosen_index = best.index;
  out.gold_index = question.gold_index;
  out.correct = best.index == question.gold_index;
  out.tie = best.tie;
  out.per_candidate_scores = report.energies;
  out.energies = report.energies;
  out.incidents = report.incidents.size();
  out.category = question.category;
  return out;
}

std::size_t symbolic_predict(const WeightedRuleSet& ruleset, const core::ChoiceQuestion& question) {
  return core::argmax(score_matrix(ruleset, question).energies).index;
}

std::size_t active_rule_count(const WeightedRuleSet& ruleset, const core::TransitionStep& step,
                              const dsl::EvalBudget& budget) {
  std::size_t k = 0;
  const dsl::RuleContext ctx = rule_context(step);
  for (const auto& rule : ruleset.rules()) {
    const dsl::EvalResult r = dsl::eval_rule(rule.ast, ctx, budget);
    if (r.ok() && r.score != 0.0) ++k;
  }
  return k;
}

std::string ruleset_to_json(const WeightedRuleSet& ruleset) {
  json rules = json::array();
  for (const auto& r : ruleset.rules()) {
    rules.push_back({{"id", r.source.id},
                     {"description", r.source.description},
                     {"source", r.source.source},
                     {"weight", r.weight},
                     {"provenance",
                      {{"phase", r.provenance.phase},
                       {"cluster_id", r.provenance.cluster_id},
                       {"reflections", r.provenance.reflections}}}});
  }
  const json doc = {{"version", ruleset.version()}, {"rules", rules}};
  return doc.dump(2) + "\n";
}

WeightedRuleSet ruleset_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("ruleset: invalid JSON: ") + e.what());
  }
  std::vector<dsl::RuleSource> sources;
  std::vector<double> weights;
  std::vector<Provenance> provenance;
  try {
    if (!doc.is_object() || !doc.contains("rules")) throw FormatError("ruleset: expected an object with 'rules'");
    for (const auto& r : doc.at("rules")) {
      sources.push_back({r.at("id").get<std::string>(), r.value("description", std::string()),
                         r.at("source").get<std::string>()});
      weights.push_back(r.value("weight", 1.0));
      Provenance p;
      if (r.contains("provenance")) {
        const auto& pj = r.at("provenance");
        p.phase = pj.value("phase", std::string("manual"));
        p.cluster_id = pj.value("cluster_id", -1);
        p.reflections = pj.value("reflections", std::size_t{0});
      }
      provenance.push_back(p);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("ruleset: ") + e.what());
  }
  try {
    return WeightedRuleSet::make(sources, weights, provenance, doc.value("version", std::uint64_t{0}));
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
}

void ruleset_save(const std::filesystem::path& path, const WeightedRuleSet& ruleset) {
  core::write_file(path, ruleset_to_json(ruleset));
}

WeightedRuleSet ruleset_load(const std::filesystem::path& path) { return ruleset_from_json(core::read_file(path)); }

}  // namespace rulefuse::symbolic
