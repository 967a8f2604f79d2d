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

#include "rulefuse/dsl/regex.hpp"

#include <bitset>
#include <cctype>
#include <limits>
#include <memory>

namespace rulefuse::dsl {

namespace {

constexpr int kInfinite = -1;
constexpr int kMaxNesting = 200;

struct Node {
  enum class Kind { kEmpty, kByte, kAny, kClass, kConcat, kAlt, kRepeat, kGroup, kBegin, kEnd, kWordB, kNotWordB };
  Kind kind = Kind::kEmpty;
  std::uint8_t byte = 0;
  std::bitset<256> cls;
  std::vector<Node> kids;
  int min = 0;
  int max = 0;
  bool greedy = true;
  std::size_t group = 0;

  static Node of(Kind k) {
    Node n;
    n.kind = k;
    return n;
  }
};

std::bitset<256> class_of(char esc) {
  std::bitset<256> s;
  for (int c = 0; c < 256; ++c) {
    const bool digit = c >= '0' && c <= '9';
    const bool word = digit || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    switch (esc) {
      case 'd': s[c] = digit; break;
      case 'D': s[c] = !digit; break;
      case 'w': s[c] = word; break;
      case 'W': s[c] = !word; break;
      case 's': s[c] = space; break;
      case 'S': s[c] = !space; break;
      default: break;
    }
  }
  return s;
}

bool is_class_escape(char c) { return c == 'd' || c == 'D' || c == 'w' || c == 'W' || c == 's' || c == 'S'; }

// Returns the byte for a single-character escape, or -1.
int control_escape(char c) {
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'f': return '\f';
    case 'v': return '\v';
    case '0': return '\0';
    default: return -1;
  }
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_'; }

class Parser {
 public:
  explicit Parser(std::string_view p) : p_(p) {}

  Node parse() {
    Node n = parse_alt(0);
    if (pos_ < p_.size()) fail("unbalanced ')'");
    return n;
  }

  std::size_t groups() const { return groups_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw RegexError("invalid regex at offset " + std::to_string(pos_) + ": " + what);
  }

  bool at_end() const { return pos_ >= p_.size(); }
  char peek() const { return p_[pos_]; }

  Node parse_alt(int depth) {
    if (depth > kMaxNesting) fail("groups nested too deeply");
    Node first = parse_concat(depth);
    if (at_end() || peek() != '|') return first;
    Node alt;
    alt.kind = Node::Kind::kAlt;
    alt.kids.push_back(std::move(first));
    while (!at_end() && peek() == '|') {
      ++pos_;
      alt.kids.push_back(parse_concat(depth));
    }
    return alt;
  }

  Node parse_concat(int depth) {
    Node cat;
    cat.kind = Node::Kind::kConcat;
    while (!at_end() && peek() != '|' && peek() != ')') cat.kids.push_back(parse_repeat(depth));
    if (cat.kids.size() == 1) return std::move(cat.kids.front());
    if (cat.kids.empty()) return Node{};
    return cat;
  }

  // Parses `{m}`, `{m,}` or `{m,n}` at pos_. Leaves pos_ untouched and
  // returns false when the text is not a well-formed bound.
  bool parse_bound(int& lo, int& hi) {
    std::size_t i = pos_ + 1;
    auto read_int = [&](int& out) {
      const std::size_t start = i;
      long long v = 0;
      while (i < p_.size() && std::isdigit(static_cast<unsigned char>(p_[i]))) {
        v = v * 10 + (p_[i] - '0');
        if (v > Regex::kMaxRepeat) v = Regex::kMaxRepeat + 1;
        ++i;
      }
      out = static_cast<int>(v);
      return i > start;
    };
    if (!read_int(lo)) return false;
    if (i < p_.size() && p_[i] == '}') {
      hi = lo;
    } else if (i < p_.size() && p_[i] == ',') {
      ++i;
      if (i < p_.size() && p_[i] == '}') {
        hi = kInfinite;
      } else if (!read_int(hi) || i >= p_.size() || p_[i] != '}') {
        return false;
      }
    } else {
      return false;
    }
    pos_ = i + 1;
    return true;
  }

  bool quantifier_ahead() {
    if (at_end()) return false;
    const char c = peek();
    if (c == '*' || c == '+' || c == '?') return true;
    if (c == '{') {
      const std::size_t save = pos_;
      int lo = 0;
      int hi = 0;
      const bool ok = parse_bound(lo, hi);
      pos_ = save;
      return ok;
    }
    return false;
  }

  Node parse_repeat(int depth) {
    Node atom = parse_atom(depth);
    if (!quantifier_ahead()) return atom;
    if (atom.kind == Node::Kind::kBegin || atom.kind == Node::Kind::kEnd || atom.kind == Node::Kind::kWordB ||
        atom.kind == Node::Kind::kNotWordB) {
      fail("nothing to repeat");
    }
    Node rep;
    rep.kind = Node::Kind::kRepeat;
    const char c = peek();
    if (c == '*') {
      rep.min = 0, rep.max = kInfinite, ++pos_;
    } else if (c == '+') {
      rep.min = 1, rep.max = kInfinite, ++pos_;
    } else if (c == '?') {
      rep.min = 0, rep.max = 1, ++pos_;
    } else {
      parse_bound(rep.min, rep.max);
      if (rep.min > Regex::kMaxRepeat || rep.max > Regex::kMaxRepeat) fail("repeat count too large");
      if (rep.max != kInfinite && rep.max < rep.min) fail("repeat bounds out of order");
    }
    if (!at_end() && peek() == '?') {
      rep.greedy = false;
      ++pos_;
    }
    if (quantifier_ahead()) fail("nested quantifier");
    rep.kids.push_back(std::move(atom));
    return rep;
  }

  Node byte_node(unsigned char b) {
    Node n;
    n.kind = Node::Kind::kByte;
    n.byte = b;
    return n;
  }

  Node parse_atom(int depth) {
    const char c = peek();
    switch (c) {
      case '(': {
        ++pos_;
        bool capture = true;
        if (p_.substr(pos_, 2) == "?:") {
          capture = false;
          pos_ += 2;
        } else if (!at_end() && peek() == '?') {
          fail("unsupported group syntax");
        }
        const std::size_t index = capture ? ++groups_ : 0;
        Node inner = parse_alt(depth + 1);
        if (at_end() || peek() != ')') fail("missing ')'");
        ++pos_;
        if (!capture) return inner;
        Node g;
        g.kind = Node::Kind::kGroup;
        g.group = index;
        g.kids.push_back(std::move(inner));
        return g;
      }
      case '[':
        return parse_class();
      case '.': {
        ++pos_;
        Node n;
        n.kind = Node::Kind::kAny;
        return n;
      }
      case '^':
        ++pos_;
        return Node::of(Node::Kind::kBegin);
      case '$':
        ++pos_;
        return Node::of(Node::Kind::kEnd);
      case '*':
      case '+':
      case '?':
        fail("nothing to repeat");
      case '{':
        if (quantifier_ahead()) fail("nothing to repeat");
        ++pos_;
        return byte_node('{');
      case '\\':
        return parse_escape();
      default:
        ++pos_;
        return byte_node(static_cast<unsigned char>(c));
    }
  }

  Node parse_escape() {
    ++pos_;
    if (at_end()) fail("trailing backslash");
    const char e = peek();
    ++pos_;
    if (is_class_escape(e)) {
      Node n;
      n.kind = Node::Kind::kClass;
      n.cls = class_of(e);
      return n;
    }
    if (e == 'b') return Node::of(Node::Kind::kWordB);
    if (e == 'B') return Node::of(Node::Kind::kNotWordB);
    if (const int b = control_escape(e); b >= 0) return byte_node(static_cast<unsigned char>(b));
    if (std::isalnum(static_cast<unsigned char>(e))) fail(std::string("unknown escape \\") + e);
    return byte_node(static_cast<unsigned char>(e));
  }

  // One class member at pos_: returns a set, and sets `single` when the
  // member is a single byte usable as a range endpoint.
  std::bitset<256> class_member(int& single) {
    single = -1;
    std::bitset<256> s;
    char c = peek();
    ++pos_;
    if (c == '\\') {
      if (at_end()) fail("trailing backslash");
      const char e = peek();
      ++pos_;
      if (is_class_escape(e)) return class_of(e);
      if (const int b = control_escape(e); b >= 0) {
        single = b;
      } else if (std::isalnum(static_cast<unsigned char>(e))) {
        fail(std::string("unknown escape \\") + e + " in class");
      } else {
        single = static_cast<unsigned char>(e);
      }
    } else {
      single = static_cast<unsigned char>(c);
    }
    s.set(static_cast<std::size_t>(single));
    return s;
  }

  Node parse_class() {
    ++pos_;  // '['
    bool negate = false;
    if (!at_end() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    std::bitset<256> set;
    bool first = true;
    while (true) {
      if (at_end()) fail("missing ']'");
      if (peek() == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      int lo = -1;
      std::bitset<256> member = class_member(lo);
      if (lo >= 0 && pos_ + 1 < p_.size() && peek() == '-' && p_[pos_ + 1] != ']') {
        ++pos_;
        int hi = -1;
        class_member(hi);
        if (hi < 0) fail("invalid range endpoint");
        if (lo > hi) fail("range out of order");
        for (int b = lo; b <= hi; ++b) member.set(static_cast<std::size_t>(b));
      }
      set |= member;
    }
    if (negate) set.flip();
    Node n;
    n.kind = Node::Kind::kClass;
    n.cls = set;
    return n;
  }

  std::string_view p_;
  std::size_t pos_ = 0;
  std::size_t groups_ = 0;
};

}  // namespace

class RegexCompiler {
 public:
  explicit RegexCompiler(Regex& re) : re_(re) {}

  void compile(const Node& root) {
    emit({Regex::Inst::Op::kSave, 0, 0, 0});
    gen(root);
    emit({Regex::Inst::Op::kSave, 0, 1, 0});
    emit({Regex::Inst::Op::kMatch, 0, 0, 0});
  }

 private:
  using Inst = Regex::Inst;
  using Op = Inst::Op;

  std::uint32_t pc() const { return static_cast<std::uint32_t>(re_.program_.size()); }

  std::uint32_t emit(Inst inst) {
    if (re_.program_.size() >= Regex::kMaxProgramSize) throw RegexError("regex program too large");
    re_.program_.push_back(inst);
    return pc() - 1;
  }

  // Split whose preferred branch is `first_pref` unless the repeat is lazy.
  void set_split(std::uint32_t at, std::uint32_t body, std::uint32_t out, bool greedy) {
    re_.program_[at].x = greedy ? body : out;
    re_.program_[at].y = greedy ? out : body;
  }

  void gen(const Node& n) {
    switch (n.kind) {
      case Node::Kind::kEmpty:
        return;
      case Node::Kind::kByte:
        emit({Op::kByte, n.byte, 0, 0});
        return;
      case Node::Kind::kAny:
        emit({Op::kAny, 0, 0, 0});
        return;
      case Node::Kind::kClass: {
        re_.classes_.push_back(n.cls);
        emit({Op::kClass, 0, static_cast<std::uint32_t>(re_.classes_.size() - 1), 0});
        return;
      }
      case Node::Kind::kBegin:
        emit({Op::kBegin, 0, 0, 0});
        return;
      case Node::Kind::kEnd:
        emit({Op::kEnd, 0, 0, 0});
        return;
      case Node::Kind::kWordB:
        emit({Op::kWordB, 0, 0, 0});
        return;
      case Node::Kind::kNotWordB:
        emit({Op::kNotWordB, 0, 0, 0});
        return;
      case Node::Kind::kConcat:
        for (const Node& k : n.kids) gen(k);
        return;
      case Node::Kind::kGroup:
        emit({Op::kSave, 0, static_cast<std::uint32_t>(2 * n.group), 0});
        gen(n.kids.front());
        emit({Op::kSave, 0, static_cast<std::uint32_t>(2 * n.group + 1), 0});
        return;
      case Node::Kind::kAlt: {
        std::vector<std::uint32_t> exits;
        for (std::size_t i = 0; i + 1 < n.kids.size(); ++i) {
          const std::uint32_t split = emit({Op::kSplit, 0, 0, 0});
          re_.program_[split].x = pc();
          gen(n.kids[i]);
          exits.push_back(emit({Op::kJmp, 0, 0, 0}));
          re_.program_[split].y = pc();
        }
        gen(n.kids.back());
        for (std::uint32_t j : exits) re_.program_[j].x = pc();
        return;
      }
      case Node::Kind::kRepeat:
        gen_repeat(n);
        return;
    }
  }

  void gen_repeat(const Node& n) {
    const Node& body = n.kids.front();
    for (int i = 0; i < n.min; ++i) gen(body);
    if (n.max == kInfinite) {
      const std::uint32_t split = emit({Op::kSplit, 0, 0, 0});
      gen(body);
      emit({Op::kJmp, 0, split, 0});
      set_split(split, split + 1, pc(), n.greedy);
      return;
    }
    std::vector<std::uint32_t> splits;
    for (int i = n.min; i < n.max; ++i) {
      const std::uint32_t split = emit({Op::kSplit, 0, 0, 0});
      splits.push_back(split);
      gen(body);
    }
    for (std::uint32_t s : splits) set_split(s, s + 1, pc(), n.greedy);
  }

  Regex& re_;
};

std::string_view RegexMatch::group(std::string_view input, std::size_t g) const {
  const auto [b, e] = groups.at(g);
  if (b == npos) return {};
  return input.substr(b, e - b);
}

Regex Regex::compile(std::string_view pattern) {
  Parser parser(pattern);
  Node root = parser.parse();
  Regex re;
  re.pattern_ = std::string(pattern);
  re.groups_ = parser.groups();
  RegexCompiler(re).compile(root);
  return re;
}

namespace {

// Ordered set of program counters with per-pc capture slots.
class ThreadList {
 public:
  ThreadList(std::size_t prog_size, std::size_t ncap)
      : sparse_(prog_size, 0), dense_(), caps_(prog_size * ncap), ncap_(ncap) {
    dense_.reserve(prog_size);
  }

  bool contains(std::uint32_t pc) const {
    const std::uint32_t i = sparse_[pc];
    return i < dense_.size() && dense_[i] == pc;
  }
  void insert(std::uint32_t pc) {
    sparse_[pc] = static_cast<std::uint32_t>(dense_.size());
    dense_.push_back(pc);
  }
  void clear() { dense_.clear(); }
  bool empty() const { return dense_.empty(); }
  const std::vector<std::uint32_t>& order() const { return dense_; }
  std::size_t* caps(std::uint32_t pc) { return caps_.data() + static_cast<std::size_t>(pc) * ncap_; }

 private:
  std::vector<std::uint32_t> sparse_;
  std::vector<std::uint32_t> dense_;
  std::vector<std::size_t> caps_;
  std::size_t ncap_;
};

}  // namespace

std::optional<RegexMatch> Regex::search(std::string_view input) const {
  const std::size_t ncap = 2 * (groups_ + 1);
  const std::size_t n = input.size();
  ThreadList clist(program_.size(), ncap);
  ThreadList nlist(program_.size(), ncap);
  std::vector<std::size_t> scratch(ncap, RegexMatch::npos);
  std::vector<std::size_t> best;

  struct Frame {
    std::uint32_t pc;
    bool restore;
    std::uint32_t slot;
    std::size_t old;
  };
  std::vector<Frame> stack;

  auto word_at = [&](std::size_t i) { return i < n && is_word_byte(static_cast<unsigned char>(input[i])); };

  // Follows empty-width instructions from pc0 at position pos, recording
  // every reached pc (in priority order) with the captures along its path.
  auto add = [&](ThreadList& list, std::uint32_t pc0, std::size_t pos) {
    stack.push_back({pc0, false, 0, 0});
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.restore) {
        scratch[f.slot] = f.old;
        continue;
      }
      const std::uint32_t pc = f.pc;
      if (list.contains(pc)) continue;
      list.insert(pc);
      const Inst& inst = program_[pc];
      switch (inst.op) {
        case Inst::Op::kJmp:
          stack.push_back({inst.x, false, 0, 0});
          break;
        case Inst::Op::kSplit:
          stack.push_back({inst.y, false, 0, 0});
          stack.push_back({inst.x, false, 0, 0});
          break;
        case Inst::Op::kSave:
          stack.push_back({0, true, inst.x, scratch[inst.x]});
          scratch[inst.x] = pos;
          stack.push_back({pc + 1, false, 0, 0});
          break;
        case Inst::Op::kBegin:
          if (pos == 0) stack.push_back({pc + 1, false, 0, 0});
          break;
        case Inst::Op::kEnd:
          if (pos == n) stack.push_back({pc + 1, false, 0, 0});
          break;
        case Inst::Op::kWordB:
        case Inst::Op::kNotWordB: {
          const bool boundary = (pos > 0 && word_at(pos - 1)) != word_at(pos);
          if (boundary == (inst.op == Inst::Op::kWordB)) stack.push_back({pc + 1, false, 0, 0});
          break;
        }
        default:
          std::copy(scratch.begin(), scratch.end(), list.caps(pc));
          break;
      }
    }
  };

  bool matched = false;
  for (std::size_t pos = 0; pos <= n; ++pos) {
    if (!matched) {
      std::fill(scratch.begin(), scratch.end(), RegexMatch::npos);
      add(clist, 0, pos);
    }
    if (clist.empty()) break;
    nlist.clear();
    for (std::uint32_t pc : clist.order()) {
      const Inst& inst = program_[pc];
      bool advance = false;
      switch (inst.op) {
        case Inst::Op::kByte:
          advance = pos < n && static_cast<unsigned char>(input[pos]) == inst.byte;
          break;
        case Inst::Op::kAny:
          advance = pos < n && input[pos] != '\n';
          break;
        case Inst::Op::kClass:
          advance = pos < n && classes_[inst.x][static_cast<unsigned char>(input[pos])];
          break;
        case Inst::Op::kMatch: {
          const std::size_t* c = clist.caps(pc);
          best.assign(c, c + ncap);
          matched = true;
          break;
        }
        default:
          break;
      }
      if (inst.op == Inst::Op::kMatch) break;  // lower-priority threads lose
      if (advance) {
        const std::size_t* c = clist.caps(pc);
        std::copy(c, c + ncap, scratch.begin());
        add(nlist, pc + 1, pos + 1);
      }
    }
    std::swap(clist, nlist);
    if (matched && clist.empty()) break;
  }
  if (!matched) return std::nullopt;
  RegexMatch m;
  m.groups.resize(groups_ + 1);
  for (std::size_t g = 0; g <= groups_; ++g) {
    const std::size_t b = best[2 * g];
    const std::size_t e = best[2 * g + 1];
    if (b == RegexMatch::npos || e == RegexMatch::npos) {
      m.groups[g] = {RegexMatch::npos, RegexMatch::npos};
    } else {
      m.groups[g] = {b, e};
    }
  }
  return m;
}

}  // namespace rulefuse::dsl
