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

// Small string helpers shared across modules.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rulefuse::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::string to_lower(std::string_view s);

// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

// Replaces every `{name}` whose name is a key of `values`. Unknown
// placeholders are left untouched; see unresolved_placeholders().
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Names of `{identifier}` placeholders remaining in `s`.
std::vector<std::string> unresolved_placeholders(std::string_view s);

// 64-bit FNV-1a; stable across platforms, used for fingerprints and seeds.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t v);

}  // namespace rulefuse::text
