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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <string>
#include <system_error>
#include <utility>
#include <variant>

#include "rulefuse/core/text.hpp"
#include "rulefuse/dsl/rule.hpp"

namespace rulefuse::dsl {

namespace {

using Value = std::variant<double, bool, std::string_view>;

struct BudgetExceeded {
  std::string message;
};
struct TypeFailure {
  std::string message;
};

std::string_view type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "bool";
    default: return "string";
  }
}

std::string where(const Expr& e) { return std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column) + ": "; }

class Evaluator {
 public:
  Evaluator(const RuleContext& ctx, const EvalBudget& budget) : ctx_(ctx), budget_(budget) {}

  Value eval(const Expr& e) {
    charge(1);
    return std::visit([&](const auto& x) { return eval_node(e, x); }, e.node);
  }

  double number(const Expr& e) {
    Value v = eval(e);
    if (auto* d = std::get_if<double>(&v)) return *d;
    type_error(e, "expected number, got " + std::string(type_name(v)));
  }
  bool boolean(const Expr& e) {
    Value v = eval(e);
    if (auto* b = std::get_if<bool>(&v)) return *b;
    type_error(e, "expected bool, got " + std::string(type_name(v)));
  }
  std::string_view string(const Expr& e) {
    Value v = eval(e);
    if (auto* s = std::get_if<std::string_view>(&v)) return *s;
    type_error(e, "expected string, got " + std::string(type_name(v)));
  }

  [[noreturn]] static void type_error(const Expr& e, const std::string& msg) { throw TypeFailure{where(e) + msg}; }

  std::size_t steps = 0;
  std::size_t division_by_zero = 0;

 private:
  void charge(std::size_t n) {
    steps += n;
    if (steps > budget_.max_steps) {
      throw BudgetExceeded{"step budget of " + std::to_string(budget_.max_steps) + " exceeded"};
    }
  }

  void charge_bytes(std::size_t bytes) { charge(bytes / 64); }

  std::string_view store(std::string s) {
    if (s.size() > budget_.max_regex_input) {
      throw BudgetExceeded{"string of " + std::to_string(s.size()) + " bytes exceeds limit"};
    }
    charge_bytes(s.size());
    arena_.push_back(std::move(s));
    return arena_.back();
  }

  static double finite(const Expr& e, double v) {
    if (!std::isfinite(v)) type_error(e, "arithmetic produced a non-finite number");
    return v;
  }

  Value eval_node(const Expr&, const NumberLit& x) { return x.value; }
  Value eval_node(const Expr&, const StringLit& x) { return std::string_view(x.value); }
  Value eval_node(const Expr&, const BoolLit& x) { return x.value; }

  Value eval_node(const Expr&, const FieldRef& x) {
    switch (x.field) {
      case Field::kBelief: return ctx_.belief;
      case Field::kAction: return ctx_.action;
      case Field::kNextState: return ctx_.next_state;
      case Field::kReward: return ctx_.reward;
    }
    return 0.0;
  }

  Value eval_node(const Expr& e, const LocalRef& x) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == x.name) return it->second;
    }
    type_error(e, "unbound local '" + x.name + "'");
  }

  Value eval_node(const Expr& e, const Unary& x) {
    if (x.op == UnaryOp::kNot) return !boolean(*x.operand);
    return finite(e, -number(*x.operand));
  }

  Value eval_node(const Expr& e, const Binary& x) {
    switch (x.op) {
      case BinaryOp::kAnd: return boolean(*x.lhs) && boolean(*x.rhs);
      case BinaryOp::kOr: return boolean(*x.lhs) || boolean(*x.rhs);
      default: break;
    }
    const Value a = eval(*x.lhs);
    const Value b = eval(*x.rhs);
    if (x.op == BinaryOp::kEq || x.op == BinaryOp::kNe) {
      if (a.index() != b.index()) {
        type_error(e, "cannot compare " + std::string(type_name(a)) + " with " + std::string(type_name(b)));
      }
      if (std::holds_alternative<std::string_view>(a)) charge_bytes(std::get<std::string_view>(a).size());
      return (a == b) == (x.op == BinaryOp::kEq);
    }
    if (x.op == BinaryOp::kAdd && std::holds_alternative<std::string_view>(a) &&
        std::holds_alternative<std::string_view>(b)) {
      std::string joined(std::get<std::string_view>(a));
      joined += std::get<std::string_view>(b);
      return store(std::move(joined));
    }
    const bool both_numbers = std::holds_alternative<double>(a) && std::holds_alternative<double>(b);
    const bool both_strings = std::holds_alternative<std::string_view>(a) && std::holds_alternative<std::string_view>(b);
    switch (x.op) {
      case BinaryOp::kLt:
      case BinaryOp::kLe:
      case BinaryOp::kGt:
      case BinaryOp::kGe: {
        int cmp = 0;
        if (both_numbers) {
          const double l = std::get<double>(a), r = std::get<double>(b);
          cmp = l < r ? -1 : (l > r ? 1 : 0);
        } else if (both_strings) {
          const auto l = std::get<std::string_view>(a), r = std::get<std::string_view>(b);
          charge_bytes(std::min(l.size(), r.size()));
          const int c = l.compare(r);
          cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
        } else {
          type_error(e, "cannot order " + std::string(type_name(a)) + " and " + std::string(type_name(b)));
        }
        switch (x.op) {
          case BinaryOp::kLt: return cmp < 0;
          case BinaryOp::kLe: return cmp <= 0;
          case BinaryOp::kGt: return cmp > 0;
          default: return cmp >= 0;
        }
      }
      default:
        break;
    }
    if (!both_numbers) {
      type_error(e, "operator '" + std::string(binary_op_text(x.op)) + "' needs numbers, got " +
                        std::string(type_name(a)) + " and " + std::string(type_name(b)));
    }
    const double l = std::get<double>(a), r = std::get<double>(b);
    switch (x.op) {
      case BinaryOp::kAdd: return finite(e, l + r);
      case BinaryOp::kSub: return finite(e, l - r);
      case BinaryOp::kMul: return finite(e, l * r);
      default:
        if (r == 0.0) {
          ++division_by_zero;
          return 0.0;
        }
        return finite(e, l / r);
    }
  }

  Value eval_node(const Expr& e, const IfElse& x) {
    (void)e;
    return boolean(*x.cond) ? eval(*x.then_branch) : eval(*x.else_branch);
  }

  Value eval_node(const Expr&, const Let& x) {
    scope_.emplace_back(x.name, eval(*x.value));
    Value out = eval(*x.body);
    scope_.pop_back();
    return out;
  }

  const Regex& pattern_of(const Expr& e, const Call& c, std::size_t idx, Regex& storage) {
    if (c.pattern) return *c.pattern;
    const std::string_view p = string(*c.args[idx]);
    charge_bytes(p.size());
    try {
      storage = Regex::compile(p);
    } catch (const RegexError& err) {
      type_error(e, std::string("invalid pattern: ") + err.what());
    }
    return storage;
  }

  std::optional<RegexMatch> search(const Regex& re, std::string_view input) {
    if (input.size() > budget_.max_regex_input) {
      throw BudgetExceeded{"regex input of " + std::to_string(input.size()) + " bytes exceeds limit"};
    }
    charge_bytes(input.size() * std::max<std::size_t>(1, re.program_size() / 16));
    return re.search(input);
  }

  Value eval_node(const Expr& e, const Call& c) {
    const auto& a = c.args;
    switch (c.fn) {
      case Builtin::kContains:
      case Builtin::kIContains:
      case Builtin::kStartsWith:
      case Builtin::kEndsWith: {
        std::string_view s = string(*a[0]);
        std::string_view t = string(*a[1]);
        charge_bytes(s.size());
        if (c.fn == Builtin::kStartsWith) return s.substr(0, t.size()) == t;
        if (c.fn == Builtin::kEndsWith) return s.size() >= t.size() && s.substr(s.size() - t.size()) == t;
        if (c.fn == Builtin::kContains) return s.find(t) != std::string_view::npos;
        const std::string ls = text::to_lower(s), lt = text::to_lower(t);
        return ls.find(lt) != std::string::npos;
      }
      case Builtin::kRegexMatch: {
        std::string_view s = string(*a[0]);
        Regex storage;
        const Regex& re = pattern_of(e, c, 1, storage);
        return search(re, s).has_value();
      }
      case Builtin::kExtract: {
        std::string_view s = string(*a[0]);
        Regex storage;
        const Regex& re = pattern_of(e, c, 1, storage);
        auto m = search(re, s);
        if (!m) return std::string_view();
        const std::size_t g = re.group_count() >= 1 ? 1 : 0;
        if (!m->participated(g)) return std::string_view();
        return m->group(s, g);
      }
      case Builtin::kLength: {
        std::string_view s = string(*a[0]);
        return static_cast<double>(s.size());
      }
      case Builtin::kMin:
      case Builtin::kMax: {
        double acc = number(*a[0]);
        for (std::size_t i = 1; i < a.size(); ++i) {
          const double v = number(*a[i]);
          acc = c.fn == Builtin::kMin ? std::min(acc, v) : std::max(acc, v);
        }
        return acc;
      }
      case Builtin::kClamp: {
        const double v = number(*a[0]);
        const double lo = number(*a[1]);
        const double hi = number(*a[2]);
        return std::min(std::max(v, lo), hi);
      }
      case Builtin::kAbs:
        return std::fabs(number(*a[0]));
      case Builtin::kToNumber: {
        const std::string_view s = text::trim(string(*a[0]));
        charge_bytes(s.size());
        double v = 0.0;
        std::string_view digits = s;
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size() && std::isfinite(v)) return v;
        if (a.size() == 2) return number(*a[1]);
        type_error(e, "cannot convert \"" + std::string(s.substr(0, 40)) + "\" to a number");
      }
      case Builtin::kLower: {
        std::string_view s = string(*a[0]);
        return store(text::to_lower(s));
      }
    }
    type_error(e, "unknown builtin");
  }

  const RuleContext& ctx_;
  const EvalBudget& budget_;
  std::deque<std::string> arena_;
  std::vector<std::pair<std::string_view, Value>> scope_;
};

}  // namespace

std::string_view status_name(EvalStatus s) {
  switch (s) {
    case EvalStatus::kOk: return "ok";
    case EvalStatus::kBudgetExceeded: return "budget_exceeded";
    case EvalStatus::kTypeError: return "type_error";
  }
  return "?";
}

EvalResult eval_rule(const RuleAst& ast, const RuleContext& ctx, const EvalBudget& budget) {
  EvalResult result;
  Evaluator ev(ctx, budget);
  try {
    if (ev.boolean(*ast.guard)) {
      const double s = ev.number(*ast.score);
      if (std::isnan(s)) Evaluator::type_error(*ast.score, "score is NaN");
      result.score = std::clamp(s, -1.0, 1.0);
    }
  } catch (const BudgetExceeded& b) {
    result.status = EvalStatus::kBudgetExceeded;
    result.message = b.message;
  } catch (const TypeFailure& t) {
    result.status = EvalStatus::kTypeError;
    result.message = t.message;
  }
  if (!result.ok()) result.score = 0.0;
  result.steps = ev.steps;
  result.division_by_zero = ev.division_by_zero;
  return result;
}

}  // namespace rulefuse::dsl
