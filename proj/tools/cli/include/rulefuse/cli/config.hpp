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

// Run configuration for the command-line tool.
//
// A TOML file supplies defaults; command-line flags override them. Relative
// paths in the file are resolved against the file's directory. Secrets are
// never read from the file, only the names of environment variables that
// hold them.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rulefuse/bench/questions.hpp"
#include "rulefuse/induction/induce.hpp"
#include "rulefuse/pipeline/phases.hpp"

namespace rulefuse::cli {

struct ScorerSettings {
  // "mock" (score table file), "external" (HTTP endpoint) or "replay"
  // (recorded transcript).
  std::string kind = "mock";
  std::filesystem::path table;
  std::filesystem::path replay;
  neural::HttpConfig http;
  std::string normalization = "sum-logprob";
  // Append every request and response to <run_dir>/transcripts/.
  bool record = false;
};

struct LlmSettings {
  // "scripted" (JSON Lines replies) or "external" (chat completions).
  std::string kind = "scripted";
  std::filesystem::path script;
  induction::ChatConfig chat;
  bool record = false;
};

struct CliConfig {
  std::filesystem::path source;
  std::filesystem::path run_dir;
  std::size_t workers = 1;
  std::string belief_template = "toy";

  std::filesystem::path dev;
  std::filesystem::path test;
  std::filesystem::path train;
  std::filesystem::path ruleset;
  std::filesystem::path env;

  ScorerSettings scorer;
  std::optional<ScorerSettings> updated_scorer;
  LlmSettings llm;

  std::string gamma = "1";
  std::string gamma_scope = "question";

  induction::InductionOptions induction;
  // Built-in template id, or a directory with induction.txt/reflection.txt.
  std::string prompts = "toy";

  double budget_fraction = 0.5;
  std::uint64_t selection_seed = 0;
  pipeline::WeightGrid grid;

  bench::BenchSpec bench;
};

// Throws FormatError for malformed TOML or wrongly typed keys, and
// ValidationError for unknown keys.
CliConfig parse_config(std::string_view toml, const std::filesystem::path& base_dir = {});
CliConfig load_config(const std::filesystem::path& path);

// Checks the parts a command needs before any work starts.
void validate_scorer(const ScorerSettings& s, std::string_view role);
void validate_llm(const LlmSettings& s);

}  // namespace rulefuse::cli
