// Copyright 2026 The Audiomark Authors. All Rights Reserved.
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

#ifndef AUDIOMARK_TOOLS_CLI_H_
#define AUDIOMARK_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace audiomark::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotDetected = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitInfeasible = 3;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace audiomark::cli

#endif  // AUDIOMARK_TOOLS_CLI_H_
