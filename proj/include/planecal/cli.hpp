// Copyright 2026 the planecal authors
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
#include <vector>

namespace planecal {

/// Feature-extraction seed used when none is given on the command line,
/// shared by calibrate/evaluate/project so their extractions agree.
inline constexpr std::uint64_t kDefaultExtractionSeed = 12345;

/// Command-line entry point. Exit codes: 0 success, 1 usage error, 2 data
/// error, 3 solver or observability error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace planecal
