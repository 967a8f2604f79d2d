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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "rulefuse/core/belief.hpp"
#include "rulefuse/core/dataset.hpp"
#include "rulefuse/core/parallel.hpp"
#include "rulefuse/core/random.hpp"
#include "rulefuse/core/text.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse;
using core::HistoryEntry;

namespace {

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

const char* kTwoQuestions =
    R"({"id":"a","task":"t","history":[],"action":"go","candidates":[{"next_state":"x","reward":0},{"next_state":"y","reward":1}],"gold_index":1})"
    "\n"
    R"({"id":"b","task":"t","history":[{"action":"look","observation":"o","reward":0}],"action":"go","candidates":[{"next_state":"x","reward":0},{"next_state":"z","reward":0}],"gold_index":0,"category":"c"})"
    "\n";

}  // namespace

TEST_CASE("belief rendering: empty history, reward text and truncation") {
  const auto empty = core::render_belief("craft a stick", {}, "toy");
  CHECK(empty.rendered.find("craft a stick") != std::string::npos);
  CHECK(empty.rendered.find("(no history)") != std::string::npos);

  const auto half = core::render_belief("t", {{"wait", "you wait", 0.5}}, "plain");
  CHECK(half.rendered.find("reward: 0.5\n") != std::string::npos);

  core::EnvTemplate tmpl;
  tmpl.id = "tight";
  tmpl.step = "[{action}]";
  tmpl.history_char_budget = 7;  // blocks are 5, 4 and 4 chars
  const std::vector<HistoryEntry> history = {{"aaa", "", 0}, {"bb", "", 0}, {"cc", "", 0}};
  const auto b = core::render_belief("t", history, tmpl);
  CHECK(b.history.size() == 1);
  tmpl.history_char_budget = 8;
  const auto two = core::render_belief("t", history, tmpl);
  REQUIRE(two.history.size() == 2);
  CHECK(two.rendered.find("[aaa]") == std::string::npos);
  CHECK(occurrences(two.rendered, "[") == 2);

  SUBCASE("re-rendering a truncated history is idempotent") {
    const auto again = core::render_belief("t", two.history, tmpl);
    CHECK(again.rendered == two.rendered);
  }
  SUBCASE("the step cap applies") {
    core::EnvTemplate capped = tmpl;
    capped.history_char_budget = 1000;
    capped.max_history_steps = 1;
    CHECK(core::render_belief("t", history, capped).history == std::vector<HistoryEntry>{{"cc", "", 0}});
  }
  CHECK_THROWS_AS(core::render_belief("  ", {}, "plain"), ValidationError);
  CHECK_THROWS_AS(core::render_belief("t", {}, "nope"), ValidationError);
}

TEST_CASE("toy template shows the current state once") {
  const auto b = core::render_belief("t", {{"look", "you look\ninventory: log=1\nstations: (none)", 0}}, "toy");
  CHECK(occurrences(b.rendered, "inventory: log=1") == 1);
  CHECK(b.rendered.find("Current state:\ninventory: log=1\nstations: (none)\n") != std::string::npos);
}

TEST_CASE("question files load in order and reject bad records") {
  const auto qs = core::parse_questions(kTwoQuestions, "plain");
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].id == "a");
  CHECK(qs[1].id == "b");
  CHECK(qs[1].category == "c");
  CHECK(qs[1].belief.history.size() == 1);
  CHECK(core::parse_questions(core::format_questions(qs), "plain") == qs);

  std::string bad_gold = kTwoQuestions;
  bad_gold.replace(bad_gold.find("\"gold_index\":0"), 14, "\"gold_index\":2");
  try {
    core::parse_questions(bad_gold, "plain");
    FAIL("no error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }

  std::string dup = kTwoQuestions;
  dup.replace(dup.find("\"z\""), 3, "\"x\"");
  CHECK_THROWS_WITH_AS(core::parse_questions(dup, "plain"), doctest::Contains("duplicate"), Error);

  CHECK_THROWS_AS(core::parse_questions("{not json}\n", "plain"), FormatError);
  CHECK_THROWS_AS(core::dataset_load("/nonexistent/x.jsonl"), IoError);
}

TEST_CASE("dataset and step files round-trip through disk") {
  const auto dir = fixtures::tmp_dir("core-roundtrip");
  const auto qs = core::parse_questions(kTwoQuestions, "plain");
  core::dataset_save(dir / "q.jsonl", qs);
  CHECK(core::dataset_load(dir / "q.jsonl", "plain") == qs);

  const auto steps = core::steps_load(fixtures::toy_data() / "train_steps.jsonl");
  REQUIRE(steps.size() > 10);
  const std::vector<core::TransitionStep> head(steps.begin(), steps.begin() + 10);
  core::steps_save(dir / "s.jsonl", head);
  CHECK(core::steps_load(dir / "s.jsonl") == head);
  CHECK_NOTHROW(core::validate_step_order(steps));

  auto shuffled = head;
  std::swap(shuffled[0], shuffled[1]);
  if (shuffled[0].trajectory_id == shuffled[1].trajectory_id) CHECK_THROWS_AS(core::validate_step_order(shuffled), ValidationError);
}

TEST_CASE("argmax breaks ties towards the lowest index") {
  CHECK(core::argmax({0, 0, 0}).index == 0);
  CHECK(core::argmax({0, 0, 0}).tie);
  CHECK(core::argmax({-1, 0.2, 0.2}).index == 1);
  CHECK(core::argmax({-1, 3, 0}).index == 1);
  CHECK_FALSE(core::argmax({-1, 3, 0}).tie);
}

TEST_CASE("text helpers") {
  core::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.unit() - 0.5, static_cast<int>(rng.below(80)) - 40);
    CHECK(std::stod(text::format_number(v)) == v);
  }
  CHECK(text::format_number(0.5) == "0.5");
  CHECK(text::format_number(1.0) == "1");
  CHECK(text::substitute("{a} and {b} and {c}", {{"a", "1"}, {"b", "{c}"}}) == "1 and {c} and {c}");
  CHECK(text::unresolved_placeholders("x {y} {not closed") == std::vector<std::string>{"y"});
  CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(text::trim("  x \n") == "x");
  CHECK(text::split_lines("a\nb") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parallel_for fills every slot and rethrows the lowest failing index") {
  for (std::size_t workers : {1, 2, 8}) {
    std::vector<int> out(1000, -1);
    core::parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
    CHECK_THROWS_WITH(core::parallel_for(100, workers,
                                         [](std::size_t i) {
                                           if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
                                         }),
                      "17");
  }
}

TEST_CASE("seeded generator is reproducible and unbiased in range") {
  core::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) counts[a.below(6)]++;
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const int v = a.between(-3, 3);
    CHECK((v >= -3 && v <= 3));
    const double u = a.unit();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
