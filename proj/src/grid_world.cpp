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

#include "brd/grid_world.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace brd::sg {

bool GridWorldSpec::is_goal(Cell c) const {
  return std::find(goals.begin(), goals.end(), c) != goals.end();
}

namespace {

void validate_spec(const GridWorldSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (!spec.in_bounds(spec.start)) {
    throw std::invalid_argument("start cell (" + std::to_string(spec.start.row) +
                                "," + std::to_string(spec.start.col) +
                                ") is outside the grid");
  }
  if (spec.goals.empty()) {
    throw std::invalid_argument("goal_cells must be non-empty");
  }
  for (const Cell& g : spec.goals) {
    if (!spec.in_bounds(g)) {
      throw std::invalid_argument("goal cell (" + std::to_string(g.row) + "," +
                                  std::to_string(g.col) +
                                  ") is outside the grid");
    }
  }
  for (std::size_t i = 0; i < spec.goals.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.goals.size(); ++j) {
      if (spec.goals[i] == spec.goals[j]) {
        throw std::invalid_argument("duplicate goal cell");
      }
    }
  }
}

}  // namespace

Cell apply_move(const GridWorldSpec& spec, Cell from, int action) {
  Cell to = from;
  switch (action) {
    case kUp: to.row -= 1; break;
    case kDown: to.row += 1; break;
    case kLeft: to.col -= 1; break;
    case kRight: to.col += 1; break;
    default:
      throw std::invalid_argument("invalid action " + std::to_string(action));
  }
  // Moves that would leave the grid clip to the current cell.
  if (!spec.in_bounds(to)) return from;
  return to;
}

int joint_state(const GridWorldSpec& spec, Cell pos1, Cell pos2) {
  return spec.cell_index(pos1) * spec.num_cells() + spec.cell_index(pos2);
}

std::pair<Cell, Cell> agent_positions(const GridWorldSpec& spec, int state) {
  const int cells = spec.num_cells();
  if (state < 0 || state >= cells * cells) {
    throw std::invalid_argument("state has no grid positions");
  }
  return {spec.cell_at(state / cells), spec.cell_at(state % cells)};
}

TabularSG build_gridworld(const GridWorldSpec& spec, int horizon,
                          double discount) {
  validate_spec(spec);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(discount > 0.0) || discount > 1.0) {
    throw std::invalid_argument("discount must lie in (0, 1]");
  }

  const int cells = spec.num_cells();
  TabularSG game;
  game.num_joint_states = cells * cells + 1;
  game.num_actions = kNumActions;
  game.terminal_state = cells * cells;
  game.initial_state = joint_state(spec, spec.start, spec.start);
  game.horizon = horizon;
  game.discount = discount;
  game.grid = spec;

  const std::size_t table =
      static_cast<std::size_t>(game.num_joint_states) * game.num_joint_actions();
  game.next.assign(table, game.terminal_state);
  game.reward.assign(table, 0.0);

  for (int p1 = 0; p1 < cells; ++p1) {
    for (int p2 = 0; p2 < cells; ++p2) {
      const int state = p1 * cells + p2;
      const Cell c1 = spec.cell_at(p1);
      const Cell c2 = spec.cell_at(p2);
      for (int a1 = 0; a1 < kNumActions; ++a1) {
        const Cell n1 = apply_move(spec, c1, a1);
        for (int a2 = 0; a2 < kNumActions; ++a2) {
          const Cell n2 = apply_move(spec, c2, a2);
          const std::size_t idx = game.sa_index(state, a1, a2);
          if (n1 == n2 && spec.is_goal(n1)) {
            game.reward[idx] = 1.0;
            game.next[idx] = game.terminal_state;
          } else {
            game.next[idx] = joint_state(spec, n1, n2);
          }
        }
      }
    }
  }
  // Terminal row is already absorbing with zero reward from the fill above.
  return game;
}

StepResult step(const TabularSG& game, int state, int action1, int action2) {
  if (state < 0 || state >= game.num_joint_states) {
    throw std::invalid_argument("state index " + std::to_string(state) +
                                " out of range");
  }
  if (action1 < 0 || action1 >= game.num_actions || action2 < 0 ||
      action2 >= game.num_actions) {
    throw std::invalid_argument("action index out of range");
  }
  const std::size_t idx = game.sa_index(state, action1, action2);
  return {game.next[idx], game.reward[idx]};
}

}  // namespace brd::sg
