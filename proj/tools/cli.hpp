// Copyright 2026 The qcgen Authors
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

#ifndef QCGEN_TOOLS_CLI_HPP
#define QCGEN_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace qcgen::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kMissingFile = 3,
    kMismatch = 4,
    kCorruptData = 5,
};

/// Runs the qcgen command line. args[0] is the program name. Errors are
/// reported as one JSON object on `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qcgen::cli

#endif  // QCGEN_TOOLS_CLI_HPP
