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

// The rulefuse command-line tool.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rulefuse::cli {

// Runs one command. Returns the process exit code: 0 on success, 2 for
// invalid input or configuration, 1 for other failures. Failures print one
// JSON object {"error": {"kind", "message"}} on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rulefuse::cli
