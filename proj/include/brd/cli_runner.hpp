// Copyright 2026 The brdgen Authors.
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

#ifndef BRD_CLI_RUNNER_HPP
#define BRD_CLI_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "brd/grid_world.hpp"

namespace brd::cli {

// Runs one subcommand (generate | evaluate | learner | gradcheck | sweep).
// args excludes the program name. Exit codes: 0 success, 2 config/usage
// errors, 3 numerical failures, 4 I/O failures.
int execute(const std::vector<std::string>& args);

enum class PopulationKind { kCornerSplit, kSameCorner, kDegenerate };

// Degenerate if any teammate reached no goal; same-corner if all teammates
// sit on one goal; corner-split otherwise.
PopulationKind classify_assignments(
    const std::vector<std::optional<sg::Cell>>& assignments);

std::string population_kind_name(PopulationKind kind);

}  // namespace brd::cli

#endif  // BRD_CLI_RUNNER_HPP
