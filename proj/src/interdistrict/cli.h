// Copyright 2026 The Authors.
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

// Command dispatch for the `interdistrict` tool. Reports go to `out`,
// diagnostics to `err`; the return value is the process exit status.

#ifndef INTERDISTRICT_CLI_H_
#define INTERDISTRICT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace interdistrict {

enum ExitStatus {
  kExitOk = 0,
  kExitValidation = 2,
  kExitMechanism = 3,
  kExitPropertyFails = 4,
  kExitDiversityFails = 5,
  kExitAuditFinding = 6,
};

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace interdistrict

#endif  // INTERDISTRICT_CLI_H_
