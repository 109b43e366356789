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

#ifndef BRD_HARNESS_HPP
#define BRD_HARNESS_HPP

#include <optional>
#include <vector>

#include "brd/grid_world.hpp"
#include "brd/policy.hpp"
#include "brd/trainer.hpp"

namespace brd::harness {

// Which side of the joint state a navigator treats as its own position.
// Teammates play the agent-2 role, best responses the agent-1 role.
enum class Role { kBestResponse, kTeammate };

// Deterministic (saturated-logit) policy that walks its own agent to the
// given goal corner: vertical moves until the row matches, then horizontal
// moves; at the corner it keeps emitting the vertical move, which clips.
policy::SoftmaxPolicy make_corner_expert(const sg::TabularSG& game,
                                         sg::Cell corner,
                                         Role role = Role::kTeammate);

// Greedy self-play diagnostic: which goal corner each teammate occupies at
// termination (argmax actions, ties to the lowest action index).
std::vector<std::optional<sg::Cell>> corner_assignment(
    const sg::TabularSG& game, const policy::Population& pop);

// Trains a single agent-1 policy to maximize the mean exact return over the
// fixed teammates. Uses the optimizer/learning-rate/iteration settings of
// the given config; deterministic in its seed.
policy::SoftmaxPolicy train_learner(
    const sg::TabularSG& game,
    const std::vector<policy::SoftmaxPolicy>& teammates,
    const trainer::TrainConfig& cfg);

struct RobustnessReport {
  std::vector<double> held_out_returns;
  double robustness = 0.0;  // minimum over the held-out returns
};

RobustnessReport evaluate_robustness(
    const sg::TabularSG& game, const policy::SoftmaxPolicy& learner,
    const std::vector<policy::SoftmaxPolicy>& held_out);

}  // namespace brd::harness

#endif  // BRD_HARNESS_HPP
