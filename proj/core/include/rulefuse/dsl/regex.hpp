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

// Linear-time regular expressions for rule programs.
//
// Patterns compile to a Thompson NFA that is simulated breadth-first (Pike
// VM), so matching costs O(|input| * |program|) regardless of the pattern;
// there is no backtracking. Supported syntax works on bytes:
//
//   literals, `.` (any byte but '\n'), `[...]` / `[^...]` with ranges,
//   `\d \D \w \W \s \S`, `\n \t \r \f \v`, escaped punctuation,
//   anchors `^ $` (start / end of input), `\b \B`,
//   groups `( )` and `(?: )`, alternation `|`,
//   quantifiers `* + ? {m} {m,} {m,n}` and their lazy forms (`*?` ...).
//
// Submatch semantics are leftmost-first, like Perl or ECMAScript.

#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rulefuse/core/error.hpp"

namespace rulefuse::dsl {

class RegexError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "regex"; }
};

struct RegexMatch {
  // Byte offsets [begin, end) per group; group 0 is the whole match.
  // Groups that did not participate are (npos, npos).
  std::vector<std::pair<std::size_t, std::size_t>> groups;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  bool participated(std::size_t group) const { return groups.at(group).first != npos; }
  std::string_view group(std::string_view input, std::size_t g) const;
};

class Regex {
 public:
  // Upper bound on compiled program size; larger patterns are rejected.
  static constexpr std::size_t kMaxProgramSize = 20000;
  static constexpr int kMaxRepeat = 1000;

  // Throws RegexError on malformed or oversized patterns.
  static Regex compile(std::string_view pattern);

  std::optional<RegexMatch> search(std::string_view input) const;
  bool matches(std::string_view input) const { return search(input).has_value(); }

  std::size_t group_count() const noexcept { return groups_; }  // excluding group 0
  std::size_t program_size() const noexcept { return program_.size(); }
  const std::string& pattern() const noexcept { return pattern_; }

  struct Inst {
    enum class Op : std::uint8_t { kByte, kAny, kClass, kSplit, kJmp, kSave, kMatch, kBegin, kEnd, kWordB, kNotWordB };
    Op op = Op::kMatch;
    std::uint8_t byte = 0;
    std::uint32_t x = 0;    // jump target / save slot / class index
    std::uint32_t y = 0;    // second split target (lower priority)
  };

 private:
  std::string pattern_;
  std::vector<Inst> program_;
  std::vector<std::bitset<256>> classes_;
  std::size_t groups_ = 0;

  friend class RegexCompiler;
};

}  // namespace rulefuse::dsl
