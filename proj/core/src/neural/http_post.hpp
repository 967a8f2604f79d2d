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

#pragma once

#include <cstddef>
#include <string>

namespace rulefuse::neural::detail {

struct HttpTarget {
  std::string endpoint;
  std::string token_env;
  double timeout_seconds = 60.0;
  std::size_t max_retries = 2;
};

// POSTs a JSON body to endpoint + path and returns the response body.
// Connection failures and 5xx/429 responses are retried and then raised as
// TransportError; other non-2xx statuses raise ProtocolError.
std::string post_json(const HttpTarget& target, const std::string& path, const std::string& body);

}  // namespace rulefuse::neural::detail
