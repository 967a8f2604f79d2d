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

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <system_error>
#include <utility>

#include "rulefuse/dsl/rule.hpp"

namespace rulefuse::dsl {

namespace {

struct BuiltinInfo {
  Builtin fn;
  std::string_view name;
  std::size_t min_args;
  std::size_t max_args;
  // Index of an argument that is a regex pattern, or -1.
  int pattern_arg;
};

constexpr std::size_t kVariadic = 64;

constexpr BuiltinInfo kBuiltins[] = {
    {Builtin::kContains, "contains", 2, 2, -1},     {Builtin::kIContains, "icontains", 2, 2, -1},
    {Builtin::kStartsWith, "starts_with", 2, 2, -1}, {Builtin::kEndsWith, "ends_with", 2, 2, -1},
    {Builtin::kRegexMatch, "regex_match", 2, 2, 1},  {Builtin::kExtract, "extract", 2, 2, 1},
    {Builtin::kLength, "length", 1, 1, -1},          {Builtin::kMin, "min", 2, kVariadic, -1},
    {Builtin::kMax, "max", 2, kVariadic, -1},        {Builtin::kClamp, "clamp", 3, 3, -1},
    {Builtin::kAbs, "abs", 1, 1, -1},                {Builtin::kToNumber, "to_number", 1, 2, -1},
    {Builtin::kLower, "lower", 1, 1, -1},
};

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const BuiltinInfo& builtin_info(Builtin fn) {
  for (const auto& b : kBuiltins) {
    if (b.fn == fn) return b;
  }
  throw std::logic_error("unknown builtin");
}

std::optional<Field> find_field(std::string_view name) {
  if (name == "belief") return Field::kBelief;
  if (name == "action") return Field::kAction;
  if (name == "next_state") return Field::kNextState;
  if (name == "reward") return Field::kReward;
  return std::nullopt;
}

const std::set<std::string_view> kKeywords = {"when", "score", "if", "then", "else", "let",
                                              "in",   "and",   "or", "not",  "true", "false"};

enum class Tok {
  kNumber,
  kString,
  kIdent,
  kKeyword,
  kLParen,
  kRParen,
  kComma,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAssign,
  kEnd,
};

struct Token {
  Tok type;
  std::string text;  // identifier / keyword / decoded string literal
  double number = 0.0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = here();
      if (i_ >= src_.size()) {
        t.type = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      const char c = src_[i_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t b = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) advance();
        t.text = std::string(src_.substr(b, i_ - b));
        t.type = kKeywords.count(t.text) ? Tok::kKeyword : Tok::kIdent;
      } else {
        lex_operator(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos here() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  [[noreturn]] void fail(SourcePos pos, const std::string& msg) const {
    throw ParseError(ParseError::Kind::kLexical, pos, msg);
  }

  void skip_space() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    const std::size_t b = i_;
    auto digits = [&] {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    };
    digits();
    if (i_ + 1 < src_.size() && src_[i_] == '.' && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      advance();
      digits();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        while (i_ < j) advance();
        digits();
      }
    }
    if (i_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
      fail(here(), "malformed number");
    }
    const std::string_view text = src_.substr(b, i_ - b);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(t.pos, "number out of range: " + std::string(text));
    }
    t.type = Tok::kNumber;
    t.number = v;
  }

  void lex_string(Token& t) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (i_ >= src_.size()) fail(t.pos, "unterminated string literal");
      const char c = src_[i_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (i_ >= src_.size()) fail(t.pos, "unterminated string literal");
        const char e = src_[i_];
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          default:
            // Unknown escapes are kept verbatim so regex escapes like \d can
            // be written without doubling the backslash.
            value += '\\';
            value += e;
            break;
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    t.type = Tok::kString;
    t.text = std::move(value);
  }

  void lex_operator(Token& t) {
    const char c = src_[i_];
    const char n = i_ + 1 < src_.size() ? src_[i_ + 1] : '\0';
    auto one = [&](Tok type) {
      t.type = type;
      advance();
    };
    auto two = [&](Tok type) {
      t.type = type;
      advance();
      advance();
    };
    switch (c) {
      case '(': one(Tok::kLParen); return;
      case ')': one(Tok::kRParen); return;
      case ',': one(Tok::kComma); return;
      case '+': one(Tok::kPlus); return;
      case '-': one(Tok::kMinus); return;
      case '*': one(Tok::kStar); return;
      case '/': one(Tok::kSlash); return;
      case '=':
        if (n == '=') two(Tok::kEq);
        else one(Tok::kAssign);
        return;
      case '!':
        if (n == '=') {
          two(Tok::kNe);
          return;
        }
        break;
      case '<':
        if (n == '=') two(Tok::kLe);
        else one(Tok::kLt);
        return;
      case '>':
        if (n == '=') two(Tok::kGe);
        else one(Tok::kGt);
        return;
      default:
        break;
    }
    fail(t.pos, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options) : toks_(std::move(tokens)), opts_(options) {}

  RuleAst parse_rule() {
    expect_keyword("when");
    ExprPtr guard = parse_expr();
    expect_keyword("score");
    ExprPtr score = parse_expr();
    if (peek().type != Tok::kEnd) fail_syntax(peek().pos, "unexpected " + describe(peek()) + " after score expression");
    return {std::move(guard), std::move(score)};
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }
  bool at_keyword(std::string_view kw) const { return peek().type == Tok::kKeyword && peek().text == kw; }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::kEnd: return "end of input";
      case Tok::kIdent:
      case Tok::kKeyword: return "'" + t.text + "'";
      case Tok::kNumber: return "number";
      case Tok::kString: return "string literal";
      default: return "operator";
    }
  }

  [[noreturn]] void fail_syntax(SourcePos pos, const std::string& msg) const {
    throw ParseError(ParseError::Kind::kSyntax, pos, msg);
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail_syntax(peek().pos, "expected '" + std::string(kw) + "', found " + describe(peek()));
    take();
  }

  void expect(Tok type, std::string_view what) {
    if (peek().type != type) fail_syntax(peek().pos, "expected " + std::string(what) + ", found " + describe(peek()));
    take();
  }

  ExprPtr make(SourcePos pos, decltype(Expr::node) node, std::initializer_list<const ExprPtr*> kids) {
    std::size_t depth = 1;
    for (const ExprPtr* k : kids) depth = std::max(depth, (*k)->depth + 1);
    if (depth > opts_.max_depth) {
      throw ParseError(ParseError::Kind::kDepthExceeded, pos,
                       "expression nesting exceeds maximum depth " + std::to_string(opts_.max_depth));
    }
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->pos = pos;
    e->depth = depth;
    return e;
  }

  struct Nest {
    Parser& p;
    explicit Nest(Parser& parser, SourcePos pos) : p(parser) {
      if (++p.nesting_ > 4 * p.opts_.max_depth) {
        throw ParseError(ParseError::Kind::kDepthExceeded, pos, "expression nesting exceeds maximum depth");
      }
    }
    ~Nest() { --p.nesting_; }
  };

  ExprPtr parse_expr() {
    Nest guard(*this, peek().pos);
    if (at_keyword("if")) return parse_if();
    if (at_keyword("let")) return parse_let();
    return parse_or();
  }

  ExprPtr parse_if() {
    const SourcePos pos = take().pos;
    ExprPtr cond = parse_expr();
    expect_keyword("then");
    ExprPtr t = parse_expr();
    expect_keyword("else");
    ExprPtr e = parse_expr();
    return make(pos, IfElse{cond, t, e}, {&cond, &t, &e});
  }

  ExprPtr parse_let() {
    const SourcePos pos = take().pos;
    const Token& name = peek();
    if (name.type != Tok::kIdent) fail_syntax(name.pos, "expected a local name after 'let', found " + describe(name));
    if (find_field(name.text) || find_builtin(name.text)) {
      fail_syntax(name.pos, "'" + name.text + "' is reserved and cannot be rebound");
    }
    const std::string local = take().text;
    expect(Tok::kAssign, "'='");
    ExprPtr value = parse_expr();
    expect_keyword("in");
    locals_.push_back(local);
    ExprPtr body = parse_expr();
    locals_.pop_back();
    return make(pos, Let{local, value, body}, {&value, &body});
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (at_keyword("or")) {
      const SourcePos pos = take().pos;
      ExprPtr rhs = parse_and();
      lhs = make(pos, Binary{BinaryOp::kOr, lhs, rhs}, {&lhs, &rhs});
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (at_keyword("and")) {
      const SourcePos pos = take().pos;
      ExprPtr rhs = parse_not();
      lhs = make(pos, Binary{BinaryOp::kAnd, lhs, rhs}, {&lhs, &rhs});
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (at_keyword("not")) {
      Nest guard(*this, peek().pos);
      const SourcePos pos = take().pos;
      ExprPtr operand = parse_not();
      return make(pos, Unary{UnaryOp::kNot, operand}, {&operand});
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    auto op_of = [](Tok t) -> std::optional<BinaryOp> {
      switch (t) {
        case Tok::kEq: return BinaryOp::kEq;
        case Tok::kNe: return BinaryOp::kNe;
        case Tok::kLt: return BinaryOp::kLt;
        case Tok::kLe: return BinaryOp::kLe;
        case Tok::kGt: return BinaryOp::kGt;
        case Tok::kGe: return BinaryOp::kGe;
        default: return std::nullopt;
      }
    };
    if (auto op = op_of(peek().type)) {
      const SourcePos pos = take().pos;
      ExprPtr rhs = parse_add();
      if (op_of(peek().type)) fail_syntax(peek().pos, "comparisons do not chain; add parentheses");
      return make(pos, Binary{*op, lhs, rhs}, {&lhs, &rhs});
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    while (peek().type == Tok::kPlus || peek().type == Tok::kMinus) {
      const Token& t = take();
      const BinaryOp op = t.type == Tok::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      ExprPtr rhs = parse_mul();
      lhs = make(t.pos, Binary{op, lhs, rhs}, {&lhs, &rhs});
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_unary();
    while (peek().type == Tok::kStar || peek().type == Tok::kSlash) {
      const Token& t = take();
      const BinaryOp op = t.type == Tok::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      ExprPtr rhs = parse_unary();
      lhs = make(t.pos, Binary{op, lhs, rhs}, {&lhs, &rhs});
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().type == Tok::kMinus) {
      Nest guard(*this, peek().pos);
      const SourcePos pos = take().pos;
      ExprPtr operand = parse_unary();
      return make(pos, Unary{UnaryOp::kNeg, operand}, {&operand});
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::kNumber:
        take();
        return make(t.pos, NumberLit{t.number}, {});
      case Tok::kString:
        take();
        return make(t.pos, StringLit{t.text}, {});
      case Tok::kLParen: {
        take();
        ExprPtr inner = parse_expr();
        expect(Tok::kRParen, "')'");
        return inner;
      }
      case Tok::kKeyword:
        if (t.text == "true" || t.text == "false") {
          take();
          return make(t.pos, BoolLit{t.text == "true"}, {});
        }
        if (t.text == "if" || t.text == "let") return parse_expr();
        fail_syntax(t.pos, "unexpected " + describe(t));
      case Tok::kIdent:
        return parse_identifier();
      default:
        fail_syntax(t.pos, "unexpected " + describe(t));
    }
  }

  ExprPtr parse_identifier() {
    const Token& t = take();
    if (peek().type == Tok::kLParen) return parse_call(t);
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (*it == t.text) return make(t.pos, LocalRef{t.text}, {});
    }
    if (auto f = find_field(t.text)) return make(t.pos, FieldRef{*f}, {});
    throw ParseError(ParseError::Kind::kUnknownIdentifier, t.pos, "unknown identifier '" + t.text + "'");
  }

  ExprPtr parse_call(const Token& name) {
    const BuiltinInfo* info = find_builtin(name.text);
    if (!info) throw ParseError(ParseError::Kind::kUnknownIdentifier, name.pos, "unknown function '" + name.text + "'");
    take();  // '('
    std::vector<ExprPtr> args;
    if (peek().type != Tok::kRParen) {
      while (true) {
        args.push_back(parse_expr());
        if (peek().type == Tok::kComma) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::kRParen, "')' or ','");
    if (args.size() < info->min_args || args.size() > info->max_args) {
      std::string expected = std::to_string(info->min_args);
      if (info->max_args == kVariadic) {
        expected += " or more";
      } else if (info->max_args != info->min_args) {
        expected += " or " + std::to_string(info->max_args);
      }
      fail_syntax(name.pos, std::string(info->name) + "() takes " + expected + " arguments, got " +
                                std::to_string(args.size()));
    }
    Call call{info->fn, args, nullptr};
    if (info->pattern_arg >= 0) {
      const Expr& pat = *args[static_cast<std::size_t>(info->pattern_arg)];
      if (const auto* lit = std::get_if<StringLit>(&pat.node)) {
        try {
          call.pattern = std::make_shared<const Regex>(Regex::compile(lit->value));
        } catch (const RegexError& e) {
          throw ParseError(ParseError::Kind::kInvalidPattern, pat.pos, e.what());
        }
      }
    }
    std::size_t depth = 1;
    for (const auto& a : args) depth = std::max(depth, a->depth + 1);
    if (depth > opts_.max_depth) {
      throw ParseError(ParseError::Kind::kDepthExceeded, name.pos,
                       "expression nesting exceeds maximum depth " + std::to_string(opts_.max_depth));
    }
    auto e = std::make_shared<Expr>();
    e->node = std::move(call);
    e->pos = name.pos;
    e->depth = depth;
    return e;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  ParseOptions opts_;
  std::vector<std::string> locals_;
  std::size_t nesting_ = 0;
};

}  // namespace

std::string_view field_name(Field f) {
  switch (f) {
    case Field::kBelief: return "belief";
    case Field::kAction: return "action";
    case Field::kNextState: return "next_state";
    case Field::kReward: return "reward";
  }
  return "?";
}

std::string_view builtin_name(Builtin b) { return builtin_info(b).name; }

std::string_view binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kEq: return "==";
    case BinaryOp::kNe: return "!=";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
    case BinaryOp::kAnd: return "and";
    case BinaryOp::kOr: return "or";
  }
  return "?";
}

ParseError::ParseError(Kind kind, SourcePos pos, const std::string& message)
    : ValidationError(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      kind_(kind),
      pos_(pos) {}

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, NumberLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, FieldRef>) {
          return x.field == y.field;
        } else if constexpr (std::is_same_v<T, LocalRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (!equal(*x.args[i], *y.args[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, IfElse>) {
          return equal(*x.cond, *y.cond) && equal(*x.then_branch, *y.then_branch) &&
                 equal(*x.else_branch, *y.else_branch);
        } else {
          return x.name == y.name && equal(*x.value, *y.value) && equal(*x.body, *y.body);
        }
      },
      a.node);
}

RuleAst parse_rule(std::string_view source, const ParseOptions& options) {
  Parser parser(Lexer(source).run(), options);
  return parser.parse_rule();
}

RuleAst parse_rule(const RuleSource& source, const ParseOptions& options) { return parse_rule(source.source, options); }

}  // namespace rulefuse::dsl
