// Copyright 2026 The clvr Authors
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

// Command-line front end: reformulate LibSVM data into GLP files, solve GLP
// files with restarted solvers, and benchmark solver/seed/gamma grids.

#ifndef CLVR_TOOLS_CLI_HPP_
#define CLVR_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace clvr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // IO or numerical failure
inline constexpr int kExitUsage = 2;    // bad flags, bad input or unsupported request
inline constexpr int kExitBudget = 3;   // pass budget exhausted before the target

// args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clvr::cli

#endif  // CLVR_TOOLS_CLI_HPP_
