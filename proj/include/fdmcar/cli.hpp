// Copyright 2026 The fdmcar Authors
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

// Command-line driver: test, band, simulate, dump-estimates, replay.
//
// Exit codes: 0 success, 1 input (I/O, parse, bad flags), 2 the data cannot
// be tested (validation or numerical failure). Failures print a JSON error
// object to the error stream. Every output file is paired with a run
// manifest, <output>.manifest.json, holding the fully resolved command line;
// "fdmcar replay <manifest>" re-runs it.

#ifndef FDMCAR_CLI_HPP_
#define FDMCAR_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace fdmcar {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitValidation = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fdmcar

#endif  // FDMCAR_CLI_HPP_
