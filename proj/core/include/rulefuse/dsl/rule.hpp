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

// The rule language.
//
// A rule is `when <guard> score <score>`: it reads four context fields
// (belief, action, next_state, reward) and yields a score in [-1, 1], or
// exactly 0 when the guard is false. Programs are closed: no loops, no user
// functions, no I/O. See docs/rule_language.md for the grammar.

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rulefuse/core/error.hpp"
#include "rulefuse/dsl/regex.hpp"

namespace rulefuse::dsl {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class Field { kBelief, kAction, kNextState, kReward };
enum class UnaryOp { kNeg, kNot };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kEq, kNe, kLt, kLe, kGt, kGe, kAnd, kOr };
enum class Builtin {
  kContains,
  kIContains,
  kStartsWith,
  kEndsWith,
  kRegexMatch,
  kExtract,
  kLength,
  kMin,
  kMax,
  kClamp,
  kAbs,
  kToNumber,
  kLower,
};

std::string_view field_name(Field f);
std::string_view builtin_name(Builtin b);
std::string_view binary_op_text(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit {
  double value;
};
struct StringLit {
  std::string value;
};
struct BoolLit {
  bool value;
};
struct FieldRef {
  Field field;
};
struct LocalRef {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Builtin fn;
  std::vector<ExprPtr> args;
  // Pre-compiled pattern when the pattern argument is a string literal.
  std::shared_ptr<const Regex> pattern;
};
struct IfElse {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};
struct Let {
  std::string name;
  ExprPtr value;
  ExprPtr body;
};

struct Expr {
  std::variant<NumberLit, StringLit, BoolLit, FieldRef, LocalRef, Unary, Binary, Call, IfElse, Let> node;
  SourcePos pos;
  std::size_t depth = 1;
};

// Structural equality; source positions and compiled patterns are ignored.
bool equal(const Expr& a, const Expr& b);

struct RuleAst {
  ExprPtr guard;
  ExprPtr score;

  friend bool operator==(const RuleAst& a, const RuleAst& b) {
    return equal(*a.guard, *b.guard) && equal(*a.score, *b.score);
  }
};

struct RuleSource {
  std::string id;
  std::string description;
  std::string source;

  friend bool operator==(const RuleSource&, const RuleSource&) = default;
};

class ParseError : public ValidationError {
 public:
  enum class Kind { kLexical, kSyntax, kUnknownIdentifier, kDepthExceeded, kInvalidPattern };

  ParseError(Kind kind, SourcePos pos, const std::string& message);
  Kind error_kind() const noexcept { return kind_; }
  SourcePos pos() const noexcept { return pos_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  Kind kind_;
  SourcePos pos_;
};

struct ParseOptions {
  std::size_t max_depth = 64;
};

// Throws ParseError; messages start with "line:column".
RuleAst parse_rule(std::string_view source, const ParseOptions& options = {});
RuleAst parse_rule(const RuleSource& source, const ParseOptions& options = {});

// Canonical text; parse_rule(pretty_print(ast)) == ast.
std::string pretty_print(const RuleAst& ast);
std::string pretty_print(const Expr& expr);

// ---------------------------------------------------------------------------
// Evaluation

struct RuleContext {
  std::string_view belief;
  std::string_view action;
  std::string_view next_state;
  double reward = 0.0;
};

struct EvalBudget {
  std::size_t max_steps = 100000;
  std::size_t max_regex_input = 1000000;
};

enum class EvalStatus { kOk, kBudgetExceeded, kTypeError };
std::string_view status_name(EvalStatus s);

struct EvalResult {
  // In [-1, 1] when status is kOk; 0 otherwise.
  double score = 0.0;
  EvalStatus status = EvalStatus::kOk;
  std::string message;
  std::size_t division_by_zero = 0;
  std::size_t steps = 0;

  bool ok() const noexcept { return status == EvalStatus::kOk; }
};

// Pure and deterministic. A false guard yields exactly 0 without evaluating
// the score expression. Scores outside [-1, 1] are clamped; division by zero
// evaluates to 0 and is counted.
EvalResult eval_rule(const RuleAst& ast, const RuleContext& ctx, const EvalBudget& budget = {});

}  // namespace rulefuse::dsl
