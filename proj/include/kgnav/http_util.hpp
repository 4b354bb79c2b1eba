// Copyright 2026 The kgnav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace kgnav {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/'
};

// Splits an absolute http(s) URL. Throws ConfigError on anything else.
UrlParts split_url(std::string_view url);

}  // namespace kgnav
