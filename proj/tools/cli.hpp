// Copyright 2026 The chsched Authors. All rights reserved.
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

#ifndef CHSCHED_TOOLS_CLI_HPP_
#define CHSCHED_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace chsched::cli {

enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,
  kLimits = 3,
  kVerification = 4,
};

// Runs the chsched command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chsched::cli

#endif  // CHSCHED_TOOLS_CLI_HPP_
