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

#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rulefuse/bench/questions.hpp"
#include "rulefuse/cli/cli.hpp"
#include "rulefuse/cli/config.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/text.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string toy(const char* name) { return (fixtures::toy_data() / name).string(); }

std::vector<std::size_t> chosen(const fs::path& outcomes) {
  std::vector<std::size_t> out;
  for (const auto& line : text::split_lines(core::read_file(outcomes)))
    if (!text::trim(line).empty()) out.push_back(json::parse(line).at("chosen").get<std::size_t>());
  return out;
}

std::vector<std::string> eval_args(const fs::path& dir, const std::string& tag) {
  return {"eval",        "--dataset", toy("test.jsonl"),  "--scorer-table", toy("mock_scorer.json"), "--ruleset",
          toy("demo_rules.json"), "--run-dir", dir.string(), "--out", (dir / (tag + ".json")).string(),
          "--outcomes",  (dir / (tag + ".jsonl")).string()};
}

}  // namespace

TEST_CASE("eval reports the accuracy an independent evaluator computes") {
  const auto dir = fixtures::tmp_dir("cli-eval");
  const Run r = invoke(eval_args(dir, "combined"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto report = json::parse(core::read_file(dir / "combined.json"));

  const auto questions = core::dataset_load(toy("test.jsonl"));
  neural::ScorerHandle scorer{std::make_shared<neural::MockTable>(neural::MockTable::load(toy("mock_scorer.json")))};
  const std::size_t expected = fixtures::brute_force_correct(questions, scorer, bench::demo_ruleset(), 1.0);
  CHECK(report.at("overall").at("correct").get<std::size_t>() == expected);
  CHECK(report.at("overall").at("total").get<std::size_t>() == 500);
  CHECK(chosen(dir / "combined.jsonl").size() == 500);
}

TEST_CASE("gamma zero and neural-only agree choice for choice") {
  const auto dir = fixtures::tmp_dir("cli-gamma0");
  auto zero = eval_args(dir, "zero");
  zero.insert(zero.end(), {"--gamma", "fixed=0"});
  auto neural = eval_args(dir, "neural");
  neural.push_back("--neural-only");
  REQUIRE(invoke(zero).code == 0);
  REQUIRE(invoke(neural).code == 0);
  CHECK(chosen(dir / "zero.jsonl") == chosen(dir / "neural.jsonl"));
}

TEST_CASE("outputs do not depend on the worker count or the run") {
  const auto dir = fixtures::tmp_dir("cli-determinism");
  auto one = eval_args(dir, "one");
  auto again = eval_args(dir, "again");
  auto four = eval_args(dir, "four");
  four.insert(four.end(), {"--workers", "4", "--gamma", "max-log-gap"});
  one.insert(one.end(), {"--gamma", "max-log-gap"});
  again.insert(again.end(), {"--gamma", "max-log-gap"});
  REQUIRE(invoke(one).code == 0);
  REQUIRE(invoke(again).code == 0);
  REQUIRE(invoke(four).code == 0);
  CHECK(core::read_file(dir / "one.jsonl") == core::read_file(dir / "again.jsonl"));
  CHECK(core::read_file(dir / "one.jsonl") == core::read_file(dir / "four.jsonl"));
  CHECK(core::read_file(dir / "one.json") == core::read_file(dir / "again.json"));
}

TEST_CASE("configuration errors exit with code 2 and a JSON error") {
  const auto dir = fixtures::tmp_dir("cli-errors");
  core::write_file(dir / "external.toml",
                   "[data]\ndev = \"" + toy("dev.jsonl") + "\"\n[scorer]\nkind = \"external\"\n");
  const Run r = invoke({"eval", "--config", (dir / "external.toml").string(), "--run-dir", dir.string()});
  CHECK(r.code == 2);
  const auto err = json::parse(r.err);
  CHECK(err.at("error").at("kind") == "validation");
  CHECK(err.at("error").at("message").get<std::string>().find("endpoint") != std::string::npos);

  CHECK(invoke({"eval", "--no-such-flag"}).code == 2);
  CHECK(invoke({"eval", "--dataset", toy("test.jsonl"), "--scorer-table", (dir / "missing.json").string()}).code != 0);
  CHECK(invoke({"eval", "--config", (dir / "missing.toml").string()}).code != 0);

  core::write_file(dir / "typo.toml", "[scorer]\nknd = \"mock\"\n");
  CHECK_THROWS_WITH_AS(cli::load_config(dir / "typo.toml"), doctest::Contains("knd"), ValidationError);
}

TEST_CASE("config paths resolve against the config file") {
  const auto cfg = cli::load_config(fixtures::source_dir() / "configs" / "toy.toml");
  CHECK(fs::weakly_canonical(cfg.dev) == fs::weakly_canonical(fixtures::toy_data() / "dev.jsonl"));
  CHECK(fs::weakly_canonical(cfg.scorer.table) == fs::weakly_canonical(fixtures::toy_data() / "mock_scorer.json"));
  CHECK(cfg.selection_seed == 11);
  CHECK(cfg.llm.kind == "scripted");
}

TEST_CASE("select-data, learn-weights and report") {
  const auto dir = fixtures::tmp_dir("cli-commands");
  Run r = invoke({"select-data", "--train", toy("train_steps.jsonl"), "--ruleset", toy("demo_rules.json"), "--budget", "0.5",
               "--seed", "11", "--out-dir", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto plan = json::parse(core::read_file(dir / "selection_plan.json"));
  CHECK(plan.at("selected_count").get<std::size_t>() == 450);
  CHECK(fs::exists(dir / "sft_export.jsonl"));
  CHECK(invoke({"select-data", "--train", toy("train_steps.jsonl"), "--budget", "1.5", "--out-dir", dir.string()}).code == 2);

  r = invoke({"learn-weights", "--ruleset", toy("demo_rules.json"), "--dev", toy("dev.jsonl"), "--scorer-table",
           toy("mock_scorer.json"), "--out", (dir / "weighted.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto learnt = symbolic::ruleset_load(dir / "weighted.json");
  CHECK(learnt.size() == 5);
  CHECK(learnt.version() == bench::demo_ruleset().version() + 1);

  REQUIRE(invoke({"eval", "--dataset", toy("dev.jsonl"), "--scorer-table", toy("mock_scorer.json"), "--ruleset",
               toy("demo_rules.json"), "--run-dir", dir.string()})
              .code == 0);
  r = invoke({"report", "--run-dir", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("average") != std::string::npos);
}

TEST_CASE("gen-bench is reproducible") {
  const auto a = fixtures::tmp_dir("cli-gen-a");
  const auto b = fixtures::tmp_dir("cli-gen-b");
  for (const auto& dir : {a, b}) {
    const Run r = invoke({"gen-bench", "--out", dir.string(), "--seed", "3", "--dev-questions", "20", "--test-questions",
                       "30", "--train-goal-directed", "10", "--train-random", "4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
  for (const char* name : {"train_steps.jsonl", "dev.jsonl", "test.jsonl", "mock_scorer.json"})
    CHECK(core::read_file(a / name) == core::read_file(b / name));
  CHECK(core::dataset_load(a / "test.jsonl").size() == 30);
}
