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

#include <string>

#include "rulefuse/core/text.hpp"
#include "rulefuse/dsl/rule.hpp"

namespace rulefuse::dsl {

namespace {

bool is_atomic(const Expr& e) {
  return std::holds_alternative<NumberLit>(e.node) || std::holds_alternative<StringLit>(e.node) ||
         std::holds_alternative<BoolLit>(e.node) || std::holds_alternative<FieldRef>(e.node) ||
         std::holds_alternative<LocalRef>(e.node) || std::holds_alternative<Call>(e.node);
}

void quote(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
}

void print(std::string& out, const Expr& e);

void print_child(std::string& out, const Expr& e) {
  if (is_atomic(e)) {
    print(out, e);
    return;
  }
  out += '(';
  print(out, e);
  out += ')';
}

void print(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          if (x.value < 0) {
            out += "(-" + text::format_number(-x.value) + ")";
          } else {
            out += text::format_number(x.value);
          }
        } else if constexpr (std::is_same_v<T, StringLit>) {
          quote(out, x.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          out += field_name(x.field);
        } else if constexpr (std::is_same_v<T, LocalRef>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          out += x.op == UnaryOp::kNeg ? "-" : "not ";
          print_child(out, *x.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          print_child(out, *x.lhs);
          out += ' ';
          out += binary_op_text(x.op);
          out += ' ';
          print_child(out, *x.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          out += builtin_name(x.fn);
          out += '(';
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (i) out += ", ";
            print(out, *x.args[i]);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, IfElse>) {
          out += "if ";
          print_child(out, *x.cond);
          out += " then ";
          print_child(out, *x.then_branch);
          out += " else ";
          print_child(out, *x.else_branch);
        } else {
          out += "let " + x.name + " = ";
          print_child(out, *x.value);
          out += " in ";
          print_child(out, *x.body);
        }
      },
      e.node);
}

}  // namespace

std::string pretty_print(const Expr& expr) {
  std::string out;
  print(out, expr);
  return out;
}

std::string pretty_print(const RuleAst& ast) { return "when " + pretty_print(*ast.guard) + " score " + pretty_print(*ast.score); }

}  // namespace rulefuse::dsl
