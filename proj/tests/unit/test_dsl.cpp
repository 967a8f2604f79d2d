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
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "doctest.h"
#include "rulefuse/dsl/regex.hpp"
#include "rulefuse/dsl/rule.hpp"
#include "support/fixtures.hpp"

using namespace rulefuse::dsl;

namespace {

double run(const std::string& src, const RuleContext& ctx = {}, EvalStatus expect = EvalStatus::kOk) {
  const EvalResult r = eval_rule(parse_rule(src), ctx);
  INFO(src << " -> " << r.message);
  CHECK(r.status == expect);
  return r.score;
}

ParseError::Kind parse_failure(const std::string& src) {
  try {
    parse_rule(src);
  } catch (const ParseError& e) {
    return e.error_kind();
  }
  FAIL("expected a parse error for: " << src);
  return ParseError::Kind::kSyntax;
}

const RuleContext kCtx{"Task: bake\ninventory: egg=2, milk_bucket=3\noptions: |craft cake|wait|", "craft cake",
                       "crafted cake\ninventory: bucket=3, cake=1", 1.0};

}  // namespace

TEST_CASE("regex search agrees with std::regex on group 0") {
  const std::vector<std::string> patterns = {
      "a",        "a*b",        "(a|b)+c",    "^ab",        "b$",        "[a-c]{2,3}",  "x?y",     "\\d+",
      "\\w+\\s",  "[^ab]+",     "a{3}",       "(?:ab)*c",   "a+?b",      ".*b",         "\\bab",   "c|ab|a",
      "(a|ab)(c|bcd)",          "[0-9]+=(\\d)",             "b{0,2}a",   "\\Bb",        "a.c",     "(x|)y"};
  std::mt19937 rng(7);
  const std::string alphabet = "abcxy0123 =\n";
  for (const auto& p : patterns) {
    const Regex ours = Regex::compile(p);
    const std::regex theirs(p, std::regex::ECMAScript);
    for (int t = 0; t < 300; ++t) {
      std::string s;
      const int len = static_cast<int>(rng() % 12);
      for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      std::smatch m;
      // std::regex treats ^/$ as line anchors only with multiline; default is input anchors.
      const bool expected = std::regex_search(s, m, theirs);
      const auto got = ours.search(s);
      INFO("pattern " << p << " input [" << s << "]");
      REQUIRE(got.has_value() == expected);
      if (expected) {
        CHECK(got->groups[0].first == static_cast<std::size_t>(m.position(0)));
        CHECK(got->groups[0].second - got->groups[0].first == static_cast<std::size_t>(m.length(0)));
      }
    }
  }
}

TEST_CASE("regex captures are leftmost-first") {
  const Regex re = Regex::compile("(a|ab)(c|bcd)(d*)");
  const auto m = re.search("abcd");
  REQUIRE(m);
  CHECK(m->group("abcd", 1) == "a");
  CHECK(m->group("abcd", 2) == "bcd");
  CHECK(m->group("abcd", 3) == "");
  CHECK(re.group_count() == 3);
}

TEST_CASE("regex rejects malformed patterns") {
  for (const char* p : {"(", "a)", "[a", "a{2,1}", "*a", "a**", "\\", "a{1001}"}) {
    INFO(p);
    CHECK_THROWS_AS(Regex::compile(p), RegexError);
  }
}

TEST_CASE("regex runs in linear time on pathological input") {
  const Regex re = Regex::compile("(a|aa)*(a|aa)*b");
  const std::string s(20000, 'a');
  CHECK_FALSE(re.matches(s));
}

TEST_CASE("guard false yields exactly zero without evaluating the score") {
  CHECK(run("when false score 1 / 0") == 0.0);
  const EvalResult r = eval_rule(parse_rule("when false score 1 / 0"), kCtx);
  CHECK(r.division_by_zero == 0);
  CHECK(run("when false score to_number(\"x\")", kCtx) == 0.0);
}

TEST_CASE("scores are clamped and arithmetic follows precedence") {
  CHECK(run("when true score 5") == 1.0);
  CHECK(run("when true score -5") == -1.0);
  CHECK(run("when true score 0.1 + 0.2 * 2") == doctest::Approx(0.5));
  CHECK(run("when true score (1 - 0.5) / 2") == doctest::Approx(0.25));
  CHECK(run("when true score - - 0.5") == doctest::Approx(0.5));
  CHECK(run("when true score 1e-1 * 3") == doctest::Approx(0.3));
}

TEST_CASE("division by zero evaluates to zero and is counted") {
  const EvalResult r = eval_rule(parse_rule("when true score 1 / 0 + 2 / (1 - 1) + 0.5"), {});
  CHECK(r.ok());
  CHECK(r.score == 0.5);
  CHECK(r.division_by_zero == 2);
}

TEST_CASE("builtins over the context fields") {
  CHECK(run("when contains(action, \"craft\") score 1", kCtx) == 1.0);
  CHECK(run("when icontains(belief, \"TASK\") score 1", kCtx) == 1.0);
  CHECK(run("when starts_with(next_state, \"crafted\") and ends_with(next_state, \"cake=1\") score 1", kCtx) == 1.0);
  CHECK(run("when reward == 1 score 0.5", kCtx) == 0.5);
  CHECK(run("when regex_match(belief, \"egg=\\d\") score 1", kCtx) == 1.0);
  CHECK(run("when true score to_number(extract(belief, \"egg=(\\d+)\")) / 4", kCtx) == 0.5);
  CHECK(run("when true score to_number(extract(next_state, \"cake=(\\d+)\"), 0) - 1", kCtx) == 0.0);
  CHECK(run("when extract(belief, \"zebra=(\\d+)\") == \"\" score 1", kCtx) == 1.0);
  CHECK(run("when extract(action, \"c[a-z]+\") == \"craft\" score 1", kCtx) == 1.0);
  CHECK(run("when true score to_number(\"zz\", -0.25)", kCtx) == -0.25);
  CHECK(run("when true score length(action) / 100", kCtx) == doctest::Approx(0.1));
  CHECK(run("when true score min(3, 0.2, 5) + max(-1, -0.5)") == doctest::Approx(-0.3));
  CHECK(run("when true score clamp(7, 0, 0.75)") == 0.75);
  CHECK(run("when true score abs(-0.5)") == 0.5);
  CHECK(run("when lower(\"AbC\") == \"abc\" score 1") == 1.0);
  CHECK(run("when \"ab\" + \"c\" == \"abc\" and \"a\" < \"b\" score 1") == 1.0);
}

TEST_CASE("let and if expressions") {
  CHECK(run("when true score let n = to_number(extract(belief, \"milk_bucket=(\\d+)\"), 0) in "
            "if n >= 3 then 1 else -1",
            kCtx) == 1.0);
  CHECK(run("when let a = 1 in a > 0 score let a = 0.5 in let b = a in b") == 0.5);
}

TEST_CASE("type errors and budget") {
  run("when 1 score 1", {}, EvalStatus::kTypeError);
  run("when true score \"a\"", {}, EvalStatus::kTypeError);
  run("when 1 == \"1\" score 1", {}, EvalStatus::kTypeError);
  run("when true score to_number(\"x\")", {}, EvalStatus::kTypeError);
  run("when regex_match(action, action + \"(\") score 1", kCtx, EvalStatus::kTypeError);
  run("when true score 1e300 * 1e300", {}, EvalStatus::kTypeError);
  run("when 1 and true score 1", {}, EvalStatus::kTypeError);
  // Short circuit: the right operand is never evaluated.
  CHECK(run("when false and 1 score 1") == 0.0);
  CHECK(run("when true or 1 score 0.5") == 0.5);

  const RuleAst ast = parse_rule("when length(lower(lower(lower(belief)))) > 0 score 1");
  const std::string huge(300000, 'x');
  EvalResult r = eval_rule(ast, RuleContext{huge, "", "", 0}, EvalBudget{1000, 1000000});
  CHECK(r.status == EvalStatus::kBudgetExceeded);
  CHECK(r.score == 0.0);
  r = eval_rule(parse_rule("when regex_match(belief, \"x\") score 1"), RuleContext{huge, "", "", 0},
                EvalBudget{1000000, 1000});
  CHECK(r.status == EvalStatus::kBudgetExceeded);
}

TEST_CASE("parse errors carry kind and position") {
  CHECK(parse_failure("when true score @") == ParseError::Kind::kLexical);
  CHECK(parse_failure("when true score \"abc") == ParseError::Kind::kLexical);
  CHECK(parse_failure("when true") == ParseError::Kind::kSyntax);
  CHECK(parse_failure("when true score 1 2") == ParseError::Kind::kSyntax);
  CHECK(parse_failure("when 1 < 2 < 3 score 1") == ParseError::Kind::kSyntax);
  CHECK(parse_failure("when contains(action) score 1") == ParseError::Kind::kSyntax);
  CHECK(parse_failure("when true score foo") == ParseError::Kind::kUnknownIdentifier);
  CHECK(parse_failure("when true score foo(1)") == ParseError::Kind::kUnknownIdentifier);
  CHECK(parse_failure("when regex_match(action, \"(\") score 1") == ParseError::Kind::kInvalidPattern);
  CHECK(parse_failure("when true score let reward = 1 in reward") == ParseError::Kind::kSyntax);
  std::string deep = "1";
  for (int i = 0; i < 80; ++i) deep = "(" + deep + " + 1)";
  CHECK(parse_failure("when true score " + deep) == ParseError::Kind::kDepthExceeded);
  std::string parens(5000, '(');
  CHECK(parse_failure("when true score " + parens) == ParseError::Kind::kDepthExceeded);

  try {
    parse_rule("when true\nscore   $");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 2);
    CHECK(e.pos().column == 9);
    CHECK(std::string(e.what()).rfind("2:9:", 0) == 0);
  }
}

TEST_CASE("comments and escapes") {
  const RuleAst a = parse_rule("# header\nwhen true # trailing\nscore 0.5");
  CHECK(eval_rule(a, {}).score == 0.5);
  CHECK(run("when \"a\\tb\" == \"a\" + \"\\t\" + \"b\" score 1") == 1.0);
  CHECK(run("when length(\"\\d\") == 2 score 1") == 1.0);
}

TEST_CASE("pretty printing round-trips") {
  for (const char* src : {
           "when true score 1",
           "when not contains(action, \"x\") and reward >= 0.5 score -(0.25 * 2)",
           "when reward > 0 score let n = to_number(extract(belief, \"a=(\\d+)\"), 0) in if n > 3 then 1 else 0.5",
           "when \"q\\\"uote\\n\" == action or false score min(1, 2, 3) - 1e+20 / 3",
           "when true score 1 - (2 - 3) - 4",
       }) {
    const RuleAst ast = parse_rule(src);
    const std::string printed = pretty_print(ast);
    INFO(printed);
    const RuleAst again = parse_rule(printed);
    CHECK(again == ast);
    CHECK(pretty_print(again) == printed);
  }
}

TEST_CASE("minimal programs parse to the expected trees") {
  const RuleAst ast = parse_rule("when contains(action, \"smelt\") score 1.0");
  const auto* call = std::get_if<Call>(&ast.guard->node);
  REQUIRE(call != nullptr);
  CHECK(call->fn == Builtin::kContains);
  REQUIRE(call->args.size() == 2);
  CHECK(std::get<FieldRef>(call->args[0]->node).field == Field::kAction);
  CHECK(std::get<StringLit>(call->args[1]->node).value == "smelt");
  CHECK(std::get<NumberLit>(ast.score->node).value == 1.0);

  const RuleAst reward = parse_rule("when true score reward");
  CHECK(std::get<FieldRef>(reward.score->node).field == Field::kReward);
  CHECK(parse_failure("when contains(action,") == ParseError::Kind::kSyntax);
  CHECK(parse_rule(pretty_print(ast)) == ast);
}

TEST_CASE("a purchase without the button fails") {
  const char* rule = "when action == \"click[buy now]\" and not contains(belief, \"Buy Now\") score -1";
  CHECK(run(rule, RuleContext{"Results: lamp [Add to cart]", "click[buy now]", "Thank you", 1.0}) == -1.0);
  CHECK(run(rule, RuleContext{"Results: lamp [Buy Now]", "click[buy now]", "Thank you", 1.0}) == 0.0);
}

TEST_CASE("random well-typed programs stay in range and round-trip") {
  rulefuse::core::Rng rng(77);
  for (int p = 0; p < 300; ++p) {
    const std::string src = fixtures::random_rule(rng, 4);
    INFO(src);
    const RuleAst ast = parse_rule(src);
    CHECK(parse_rule(pretty_print(ast)) == ast);
    const auto ctx = fixtures::random_context(rng);
    const EvalResult r = eval_rule(ast, ctx.view());
    const EvalResult again = eval_rule(ast, ctx.view());
    CHECK(r.score == again.score);
    CHECK(r.status == again.status);
    if (r.ok()) {
      CHECK(r.score >= -1.0);
      CHECK(r.score <= 1.0);
    } else {
      CHECK(r.score == 0.0);
    }
  }
}
