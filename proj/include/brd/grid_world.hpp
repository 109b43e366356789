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

#ifndef BRD_GRID_WORLD_HPP
#define BRD_GRID_WORLD_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace brd::sg {

// Grid coordinates: row 0 is the top row, so Up decrements the row and Left
// decrements the column. (0,0) is the upper-left corner.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

enum Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumActions = 4;

struct GridWorldSpec {
  int width = 5;
  int height = 5;
  Cell start{2, 2};
  std::vector<Cell> goals{{0, 0}, {4, 4}};

  int num_cells() const { return width * height; }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  bool is_goal(Cell c) const;
  int cell_index(Cell c) const { return c.row * width + c.col; }
  Cell cell_at(int index) const { return {index / width, index % width}; }
};

// Enumerated two-player stochastic game with deterministic transitions, a
// shared reward, a deterministic initial state and one absorbing terminal
// state. Immutable after construction; safe for concurrent reads.
struct TabularSG {
  int num_joint_states = 0;
  int num_actions = 0;
  int initial_state = 0;
  int terminal_state = 0;
  int horizon = 1;
  double discount = 1.0;

  // Layout: [state * num_actions^2 + a1 * num_actions + a2].
  std::vector<std::int32_t> next;
  std::vector<double> reward;

  // Present when the game was compiled from a grid world; the harness needs
  // it to talk about agent positions.
  std::optional<GridWorldSpec> grid;

  int num_joint_actions() const { return num_actions * num_actions; }
  std::size_t sa_index(int state, int a1, int a2) const {
    return static_cast<std::size_t>(state) * num_joint_actions() +
           static_cast<std::size_t>(a1) * num_actions + a2;
  }
};

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
};

// Compiles a grid world into the tabular game. Joint states are all
// (pos1, pos2) pairs plus the terminal; both agents move simultaneously with
// boundary clipping; arriving jointly on a goal cell pays 1 and absorbs.
TabularSG build_gridworld(const GridWorldSpec& spec, int horizon,
                          double discount);

// Deterministic successor and shared reward; pure in its inputs.
StepResult step(const TabularSG& game, int state, int action1, int action2);

// Grid state helpers (valid only for games carrying grid metadata).
int joint_state(const GridWorldSpec& spec, Cell pos1, Cell pos2);
std::pair<Cell, Cell> agent_positions(const GridWorldSpec& spec, int state);
Cell apply_move(const GridWorldSpec& spec, Cell from, int action);

}  // namespace brd::sg

#endif  // BRD_GRID_WORLD_HPP
