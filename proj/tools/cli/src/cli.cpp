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

#include "rulefuse/cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/cli/config.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/error.hpp"
#include "rulefuse/core/text.hpp"
#include "rulefuse/dsl/regex.hpp"

namespace rulefuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by every command; empty values leave the config untouched.
struct CommonFlags {
  std::string config;
  std::string run_dir;
  std::size_t workers = 0;
  std::string belief_template;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "TOML run configuration");
  app->add_option("--run-dir", f.run_dir, "Directory for run artifacts");
  app->add_option("--workers", f.workers, "Parallel workers for evaluation");
  app->add_option("--belief-template", f.belief_template, "Belief rendering template (toy or plain)");
}

CliConfig resolve(const CommonFlags& f) {
  CliConfig c;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw ValidationError("config file not found: " + f.config);
    c = load_config(f.config);
  }
  if (!f.run_dir.empty()) c.run_dir = f.run_dir;
  if (f.workers) c.workers = f.workers;
  if (!f.belief_template.empty()) c.belief_template = f.belief_template;
  return c;
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ValidationError(what + " is not set");
  if (!fs::is_regular_file(p)) throw ValidationError(what + " not found: " + p.string());
}

void require_run_dir(const CliConfig& c) {
  if (c.run_dir.empty()) throw ValidationError("run directory is not set (use --run-dir or run_dir in the config)");
}

fs::path transcript_path(const CliConfig& c, const std::string& name) {
  require_run_dir(c);
  const fs::path dir = c.run_dir / "transcripts";
  fs::create_directories(dir);
  const fs::path p = dir / (name + ".jsonl");
  // Each run starts its own transcript.
  fs::remove(p);
  return p;
}

neural::ScorerHandle make_scorer(const ScorerSettings& s, const CliConfig& c, const std::string& name) {
  std::shared_ptr<neural::Scorer> inner;
  if (s.kind == "mock") {
    require_file(s.table, "score table");
    inner = std::make_shared<neural::MockTable>(neural::MockTable::load(s.table));
  } else if (s.kind == "external") {
    inner = std::make_shared<neural::HttpScorer>(s.http);
  } else {
    require_file(s.replay, "scorer transcript");
    inner = std::make_shared<neural::ReplayScorer>(s.replay);
  }
  if (s.record) inner = std::make_shared<neural::RecordingScorer>(inner, transcript_path(c, name));
  return {inner, neural::parse_normalization(s.normalization)};
}

std::shared_ptr<induction::LlmClient> make_llm(const CliConfig& c) {
  std::shared_ptr<induction::LlmClient> llm;
  if (c.llm.kind == "scripted") {
    require_file(c.llm.script, "llm script");
    llm = std::make_shared<induction::ScriptedLlmClient>(induction::ScriptedLlmClient::load(c.llm.script));
  } else {
    llm = std::make_shared<induction::HttpLlmClient>(c.llm.chat);
  }
  if (c.llm.record) llm = std::make_shared<induction::RecordingLlmClient>(llm, transcript_path(c, "llm"));
  return llm;
}

induction::PromptTemplate make_prompts(const CliConfig& c) {
  const auto ids = induction::builtin_template_ids();
  if (std::find(ids.begin(), ids.end(), c.prompts) != ids.end()) return induction::builtin_template(c.prompts);
  if (!fs::is_directory(c.prompts))
    throw ValidationError("prompts: '" + c.prompts + "' is neither a built-in template nor a directory");
  return induction::load_template(c.prompts, "custom");
}

std::vector<core::ChoiceQuestion> load_questions(const fs::path& p, const CliConfig& c, const std::string& what) {
  require_file(p, what);
  return core::dataset_load(p, c.belief_template);
}

symbolic::WeightedRuleSet load_ruleset_or_empty(const fs::path& p) {
  if (p.empty()) return {};
  require_file(p, "rule set");
  return symbolic::ruleset_load(p);
}

pipeline::PhaseConfig phase_config(const CliConfig& c) {
  pipeline::PhaseConfig pc;
  pc.policy = synergy::parse_gamma(c.gamma, c.gamma_scope);
  pc.induction = c.induction;
  pc.induction.template_id = c.prompts;
  pc.prompts = make_prompts(c);
  pc.grid = c.grid;
  pc.budget_fraction = c.budget_fraction;
  pc.selection_seed = c.selection_seed;
  pc.workers = c.workers;
  pc.run_dir = c.run_dir;
  std::string grid;
  for (double v : c.grid.values) grid += (grid.empty() ? "" : ",") + text::format_number(v);
  pc.settings = {{"gamma", pc.policy.describe()},
                 {"normalization", c.scorer.normalization},
                 {"scorer", c.scorer.kind},
                 {"llm", c.llm.kind},
                 {"prompts", pc.prompts.id},
                 {"weight_grid", grid},
                 {"weight_max_passes", std::to_string(c.grid.max_passes)},
                 {"selection_seed", std::to_string(c.selection_seed)},
                 {"budget_fraction", text::format_number(c.budget_fraction)},
                 {"max_accepted_rules", std::to_string(c.induction.max_accepted_rules)},
                 {"max_reflections", std::to_string(c.induction.max_reflections)}};
  return pc;
}

std::string fraction(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void override_table(ScorerSettings& s, const std::string& table) {
  if (table.empty()) return;
  s.kind = "mock";
  s.table = table;
}

// ---- commands -------------------------------------------------------------

struct EvalFlags {
  std::string dataset, ruleset, scorer_table, gamma, gamma_scope, normalization, out, outcomes;
  bool neural_only = false;
  bool symbolic_only = false;
};

int cmd_eval(const CommonFlags& common, const EvalFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  override_table(c.scorer, f.scorer_table);
  if (!f.gamma.empty()) c.gamma = f.gamma;
  if (!f.gamma_scope.empty()) c.gamma_scope = f.gamma_scope;
  if (!f.normalization.empty()) c.scorer.normalization = f.normalization;
  if (!f.ruleset.empty()) c.ruleset = f.ruleset;
  if (f.neural_only && f.symbolic_only) throw ValidationError("--neural-only and --symbolic-only exclude each other");

  synergy::PredictorConfig pc;
  pc.mode = f.neural_only ? synergy::PredictorMode::kNeural
                          : (f.symbolic_only ? synergy::PredictorMode::kSymbolic : synergy::PredictorMode::kCombined);
  pc.id = std::string(synergy::predictor_mode_name(pc.mode));
  pc.policy = synergy::parse_gamma(c.gamma, c.gamma_scope);
  if (pc.mode != synergy::PredictorMode::kSymbolic) validate_scorer(c.scorer, "scorer");
  if (pc.mode == synergy::PredictorMode::kSymbolic && c.ruleset.empty())
    throw ValidationError("--symbolic-only needs a rule set");
  const fs::path dataset = !f.dataset.empty() ? fs::path(f.dataset) : (!c.test.empty() ? c.test : c.dev);
  const auto questions = load_questions(dataset, c, "dataset");
  pc.ruleset = std::make_shared<const symbolic::WeightedRuleSet>(load_ruleset_or_empty(c.ruleset));
  if (pc.mode != synergy::PredictorMode::kSymbolic) pc.scorer = make_scorer(c.scorer, c, "scorer");

  const auto outcomes = pipeline::predict_dataset(pc, questions, c.workers);
  pipeline::RunReport report = pipeline::summarize(outcomes, "eval");
  report.predictor = pc.id;
  if (pc.mode != synergy::PredictorMode::kNeural) {
    report.ruleset_version = pc.ruleset->version();
    report.rule_count = pc.ruleset->size();
  }
  if (pc.mode == synergy::PredictorMode::kCombined) report.gamma = pc.policy.describe();
  if (pc.mode != synergy::PredictorMode::kSymbolic) report.normalization = c.scorer.normalization;

  fs::path report_path = f.out;
  if (report_path.empty() && !c.run_dir.empty()) report_path = c.run_dir / "report.eval.json";
  if (!report_path.empty()) {
    if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
    core::write_file(report_path, pipeline::report_to_json(report));
  }
  if (!f.outcomes.empty()) {
    const fs::path p(f.outcomes);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    core::write_file(p, pipeline::outcomes_to_jsonl(outcomes));
  }
  out << pipeline::render_report_table({report});
  return 0;
}

struct PhaseFlags {
  std::string dev, train, ruleset, scorer_table, llm_script, stage = "all", plan;
};

void apply_phase_flags(CliConfig& c, const PhaseFlags& f) {
  if (!f.dev.empty()) c.dev = f.dev;
  if (!f.train.empty()) c.train = f.train;
  if (!f.ruleset.empty()) c.ruleset = f.ruleset;
  if (!f.llm_script.empty()) {
    c.llm.kind = "scripted";
    c.llm.script = f.llm_script;
  }
}

int cmd_phase1(const CommonFlags& common, const PhaseFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  apply_phase_flags(c, f);
  override_table(c.scorer, f.scorer_table);
  require_run_dir(c);
  validate_scorer(c.scorer, "scorer");
  validate_llm(c.llm);
  const auto pc = phase_config(c);
  const auto dev = load_questions(c.dev, c, "dev set");
  const auto scorer = make_scorer(c.scorer, c, "scorer");
  const auto llm = make_llm(c);

  const auto result = pipeline::run_phase1(dev, scorer, *llm, pc);
  out << pipeline::render_report_table({result.baseline, result.report});
  out << "rules: " << result.ruleset.size() << " (accepted " << result.induction.accepted << ")\n";
  out << "ruleset: " << pipeline::ruleset_path(c.run_dir, result.ruleset.version()).lexically_normal().string() << "\n";
  return 0;
}

int cmd_phase2(const CommonFlags& common, const PhaseFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  apply_phase_flags(c, f);
  if (c.updated_scorer)
    override_table(*c.updated_scorer, f.scorer_table);
  else
    override_table(c.scorer, f.scorer_table);
  require_run_dir(c);
  if (f.stage != "all" && f.stage != "select" && f.stage != "refine")
    throw ValidationError("--stage must be all, select or refine");
  require_file(c.ruleset, "rule set");
  const bool selecting = f.stage != "refine";
  const bool refining = f.stage != "select";
  const ScorerSettings updated = c.updated_scorer.value_or(c.scorer);
  if (refining) {
    validate_scorer(updated, "updated_scorer");
    validate_llm(c.llm);
  }
  const auto pc = phase_config(c);
  const auto ruleset = symbolic::ruleset_load(c.ruleset);

  pipeline::SelectionPlan plan;
  if (selecting) {
    require_file(c.train, "training steps");
    const auto train = core::steps_load(c.train, c.belief_template);
    const auto sel = pipeline::phase2_select(train, ruleset, pc);
    plan = sel.plan;
    out << "selected " << plan.selected_count() << " of " << plan.total_steps << " steps ("
        << fraction(plan.selected_fraction()) << "), exported " << sel.exported << "\n";
    if (!plan.warning.empty()) out << "warning: " << plan.warning << "\n";
  } else {
    const fs::path plan_path = f.plan.empty() ? c.run_dir / "selection_plan.json" : fs::path(f.plan);
    require_file(plan_path, "selection plan");
    plan = pipeline::plan_from_json(core::read_file(plan_path));
  }
  if (!refining) return 0;

  const auto dev = load_questions(c.dev, c, "dev set");
  const auto scorer = make_scorer(updated, c, "updated_scorer");
  const auto llm = make_llm(c);
  const auto result = pipeline::phase2_refine(dev, ruleset, plan, scorer, *llm, pc);
  out << pipeline::render_report_table({result.report});
  out << "removed: " << result.removed.size() << ", accepted: " << result.induction.accepted << "\n";
  out << "ruleset: " << pipeline::ruleset_path(c.run_dir, result.ruleset.version()).lexically_normal().string() << "\n";
  return 0;
}

struct SelectFlags {
  std::string train, ruleset, out_dir;
  double budget = -1.0;
  std::int64_t seed = -1;
};

int cmd_select(const CommonFlags& common, const SelectFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  if (!f.train.empty()) c.train = f.train;
  if (!f.ruleset.empty()) c.ruleset = f.ruleset;
  if (f.budget >= 0.0) c.budget_fraction = f.budget;
  if (f.seed >= 0) c.selection_seed = static_cast<std::uint64_t>(f.seed);
  const fs::path dir = f.out_dir.empty() ? c.run_dir : fs::path(f.out_dir);
  if (dir.empty()) throw ValidationError("output directory is not set (use --out-dir or --run-dir)");
  require_file(c.train, "training steps");
  const auto train = core::steps_load(c.train, c.belief_template);
  const auto ruleset = load_ruleset_or_empty(c.ruleset);
  const auto plan = pipeline::select_training_data(train, ruleset, c.budget_fraction, c.selection_seed);
  fs::create_directories(dir);
  core::write_file(dir / "selection_plan.json", pipeline::plan_to_json(plan));
  const auto n = pipeline::export_sft_dataset(plan, train, dir / "sft_export.jsonl");
  out << "selected " << plan.selected_count() << " of " << plan.total_steps << " steps ("
      << fraction(plan.selected_fraction()) << "): " << plan.mandatory.size() << " uncovered, "
      << plan.sampled.size() << " sampled; exported " << n << "\n";
  if (!plan.warning.empty()) out << "warning: " << plan.warning << "\n";
  return 0;
}

struct LearnFlags {
  std::string ruleset, dev, scorer_table, gamma, out;
};

int cmd_learn(const CommonFlags& common, const LearnFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  if (!f.ruleset.empty()) c.ruleset = f.ruleset;
  if (!f.dev.empty()) c.dev = f.dev;
  if (!f.gamma.empty()) c.gamma = f.gamma;
  override_table(c.scorer, f.scorer_table);
  validate_scorer(c.scorer, "scorer");
  require_file(c.ruleset, "rule set");
  const auto policy = synergy::parse_gamma(c.gamma, c.gamma_scope);
  c.grid.validate();
  fs::path target = f.out;
  if (target.empty() && c.run_dir.empty()) throw ValidationError("output is not set (use --out or --run-dir)");
  const auto ruleset = symbolic::ruleset_load(c.ruleset);
  const auto dev = load_questions(c.dev, c, "dev set");
  auto cache = synergy::EvaluationCache::build(make_scorer(c.scorer, c, "scorer"), dev, policy, c.workers);
  const auto result = pipeline::learn_weights(ruleset, cache, c.grid);
  if (target.empty()) target = pipeline::ruleset_path(c.run_dir, result.ruleset.version());
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  symbolic::ruleset_save(target, result.ruleset);
  out << "dev correct " << result.correct_before << " -> " << result.correct_after << " of " << dev.size() << " in "
      << result.passes << " passes\n";
  for (const auto& r : result.ruleset.rules()) out << "  " << r.source.id << " = " << text::format_number(r.weight) << "\n";
  out << "ruleset: " << target.string() << "\n";
  return 0;
}

struct BenchFlags {
  std::string out, env;
  std::int64_t seed = -1;
  std::int64_t dev = -1, test = -1, train_goal = -1, train_random = -1;
};

int cmd_gen_bench(const CommonFlags& common, const BenchFlags& f, std::ostream& out) {
  CliConfig c = resolve(common);
  bench::BenchSpec spec = c.bench;
  const fs::path env = f.env.empty() ? c.env : fs::path(f.env);
  if (!env.empty()) {
    require_file(env, "environment config");
    spec.env = bench::env_load(env);
  }
  if (f.seed >= 0) spec.seed = static_cast<std::uint64_t>(f.seed);
  if (f.dev >= 0) spec.dev_questions = static_cast<std::size_t>(f.dev);
  if (f.test >= 0) spec.test_questions = static_cast<std::size_t>(f.test);
  if (f.train_goal >= 0) spec.train_goal_directed = static_cast<std::size_t>(f.train_goal);
  if (f.train_random >= 0) spec.train_random = static_cast<std::size_t>(f.train_random);
  const fs::path dir = f.out.empty() ? c.run_dir : fs::path(f.out);
  if (dir.empty()) throw ValidationError("output directory is not set (use --out)");
  const auto files = bench::generate_bench(spec);
  bench::write_bench(dir, spec, files);
  out << "train steps: " << files.train.size() << "\ndev questions: " << files.dev.size()
      << "\ntest questions: " << files.test.size() << "\nwritten to " << dir.string() << "\n";
  return 0;
}

int cmd_report(const CommonFlags& common, std::ostream& out) {
  CliConfig c = resolve(common);
  require_run_dir(c);
  if (!fs::is_directory(c.run_dir)) throw ValidationError("run directory not found: " + c.run_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(c.run_dir)) {
    const std::string name = e.path().filename().string();
    if (text::starts_with(name, "report.") && e.path().extension() == ".json") files.push_back(e.path());
  }
  if (files.empty()) throw ValidationError("no report files in " + c.run_dir.string());
  // eval first, then phases in order.
  std::sort(files.begin(), files.end());
  std::vector<pipeline::RunReport> reports;
  for (const auto& p : files) reports.push_back(pipeline::report_from_json(core::read_file(p)));
  out << pipeline::render_report_table(reports);
  for (const auto& r : reports) {
    out << "\n" << r.phase << ": rule set v" << r.ruleset_version << " (" << r.rule_count << " rules)";
    if (!r.gamma.empty()) out << ", gamma " << r.gamma;
    if (r.data_fraction) out << ", data kept " << fraction(*r.data_fraction);
    out << ", ties " << r.ties << ", incidents " << r.incidents << "\n";
    for (const auto& n : r.notes) out << "  " << n << "\n";
  }
  return 0;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

bool is_input_error(const Error& e) {
  return dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const FormatError*>(&e);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Combine a neural next-state scorer with weighted symbolic rules.", "rulefuse");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  CommonFlags common;
  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Evaluate a predictor on a question set");
  add_common(eval, common);
  eval->add_option("--dataset", ef.dataset, "Question set (JSON Lines); defaults to data.test, then data.dev");
  eval->add_option("--ruleset", ef.ruleset, "Rule set file; empty means no rules");
  eval->add_option("--scorer-table", ef.scorer_table, "Mock score table (overrides the configured scorer)");
  eval->add_option("--gamma", ef.gamma, "Gamma policy: a number, fixed=<v> or max-log-gap");
  eval->add_option("--gamma-scope", ef.gamma_scope, "max-log-gap scope: question or dataset");
  eval->add_option("--normalization", ef.normalization, "sum-logprob or per-token-mean");
  eval->add_flag("--neural-only", ef.neural_only, "Ignore the rules");
  eval->add_flag("--symbolic-only", ef.symbolic_only, "Ignore the scorer");
  eval->add_option("--out", ef.out, "Report file (default <run-dir>/report.eval.json)");
  eval->add_option("--outcomes", ef.outcomes, "Per-question outcomes file (JSON Lines)");

  PhaseFlags p1;
  auto* phase1 = app.add_subcommand("phase1", "Induce and weight a rule set for a fixed scorer");
  add_common(phase1, common);
  phase1->add_option("--dev", p1.dev, "Development questions");
  phase1->add_option("--scorer-table", p1.scorer_table, "Mock score table");
  phase1->add_option("--llm-script", p1.llm_script, "Scripted LLM replies (JSON Lines)");

  PhaseFlags p2;
  auto* phase2 = app.add_subcommand("phase2", "Select training data, then clean, extend and reweight the rules");
  add_common(phase2, common);
  phase2->add_option("--stage", p2.stage, "all, select (stop after the export) or refine (resume with an updated scorer)");
  phase2->add_option("--train", p2.train, "Training steps (JSON Lines)");
  phase2->add_option("--dev", p2.dev, "Development questions");
  phase2->add_option("--ruleset", p2.ruleset, "Rule set from phase 1");
  phase2->add_option("--scorer-table", p2.scorer_table, "Mock score table for the updated scorer");
  phase2->add_option("--llm-script", p2.llm_script, "Scripted LLM replies (JSON Lines)");
  phase2->add_option("--plan", p2.plan, "Selection plan for --stage refine (default <run-dir>/selection_plan.json)");

  SelectFlags sf;
  auto* select = app.add_subcommand("select-data", "Write a selection plan and SFT export");
  add_common(select, common);
  select->add_option("--train", sf.train, "Training steps (JSON Lines)");
  select->add_option("--ruleset", sf.ruleset, "Rule set used for coverage counts");
  select->add_option("--budget", sf.budget, "Fraction of steps to keep, in (0, 1]");
  select->add_option("--seed", sf.seed, "Sampling seed");
  select->add_option("--out-dir", sf.out_dir, "Output directory (default the run directory)");

  LearnFlags lf;
  auto* learn = app.add_subcommand("learn-weights", "Fit rule weights on a development set");
  add_common(learn, common);
  learn->add_option("--ruleset", lf.ruleset, "Rule set file");
  learn->add_option("--dev", lf.dev, "Development questions");
  learn->add_option("--scorer-table", lf.scorer_table, "Mock score table");
  learn->add_option("--gamma", lf.gamma, "Gamma policy");
  learn->add_option("--out", lf.out, "Output rule set (default <run-dir>/ruleset.v<N>.json)");

  BenchFlags bf;
  auto* gen = app.add_subcommand("gen-bench", "Generate the toy benchmark files");
  add_common(gen, common);
  gen->add_option("--out", bf.out, "Output directory");
  gen->add_option("--env", bf.env, "Environment config (JSON)");
  gen->add_option("--seed", bf.seed, "Master seed");
  gen->add_option("--dev-questions", bf.dev, "Number of dev questions");
  gen->add_option("--test-questions", bf.test, "Number of test questions");
  gen->add_option("--train-goal-directed", bf.train_goal, "Goal-directed training trajectories");
  gen->add_option("--train-random", bf.train_random, "Random training trajectories");

  auto* report = app.add_subcommand("report", "Print the accuracy table of a run directory");
  add_common(report, common);

  std::vector<const char*> argv = {"rulefuse"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (eval->parsed()) return cmd_eval(common, ef, out);
    if (phase1->parsed()) return cmd_phase1(common, p1, out);
    if (phase2->parsed()) return cmd_phase2(common, p2, out);
    if (select->parsed()) return cmd_select(common, sf, out);
    if (learn->parsed()) return cmd_learn(common, lf, out);
    if (gen->parsed()) return cmd_gen_bench(common, bf, out);
    if (report->parsed()) return cmd_report(common, out);
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return is_input_error(e) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    print_error(err, "io", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace rulefuse::cli
