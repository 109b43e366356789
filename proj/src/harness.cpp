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

#include "brd/harness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "brd/errors.hpp"
#include "brd/exact_eval.hpp"
#include "brd/kernels/kernels.hpp"
#include "brd/rng.hpp"

namespace brd::harness {
namespace {

constexpr double kSaturatedLogit = 50.0;

const sg::GridWorldSpec& require_grid(const sg::TabularSG& game) {
  if (!game.grid.has_value()) {
    throw std::invalid_argument("operation requires a grid-world game");
  }
  return *game.grid;
}

// Rows-first navigation: align the row, then the column; at the target keep
// the clipping vertical move.
int navigator_action(const sg::GridWorldSpec& spec, sg::Cell own,
                     sg::Cell corner) {
  if (own.row > corner.row) return sg::kUp;
  if (own.row < corner.row) return sg::kDown;
  if (own.col > corner.col) return sg::kLeft;
  if (own.col < corner.col) return sg::kRight;
  return corner.row == 0 ? sg::kUp
                         : (corner.row == spec.height - 1 ? sg::kDown : sg::kUp);
}

int argmax_action(const Mat& logits, int state) {
  const double* row = logits.row(state);
  int best = 0;
  for (int a = 1; a < logits.cols; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

}  // namespace

policy::SoftmaxPolicy make_corner_expert(const sg::TabularSG& game,
                                         sg::Cell corner, Role role) {
  const sg::GridWorldSpec& spec = require_grid(game);
  if (!spec.is_goal(corner)) {
    throw std::invalid_argument("corner expert target must be a goal cell");
  }

  policy::SoftmaxPolicy expert(game.num_joint_states, game.num_actions);
  for (double& v : expert.logits.data) v = -kSaturatedLogit;
  const int cells = spec.num_cells();
  for (int state = 0; state < cells * cells; ++state) {
    const auto [pos1, pos2] = sg::agent_positions(spec, state);
    const sg::Cell own = (role == Role::kBestResponse) ? pos1 : pos2;
    expert.logits(state, navigator_action(spec, own, corner)) =
        kSaturatedLogit;
  }
  // Terminal row: arbitrary fixed action.
  expert.logits(game.terminal_state, sg::kUp) = kSaturatedLogit;
  return expert;
}

std::vector<std::optional<sg::Cell>> corner_assignment(
    const sg::TabularSG& game, const policy::Population& pop) {
  const sg::GridWorldSpec& spec = require_grid(game);
  std::vector<std::optional<sg::Cell>> assignments;
  assignments.reserve(pop.size());

  for (int i = 0; i < pop.size(); ++i) {
    const Mat& br_logits = pop.best_responses[i].logits;
    const Mat& tm_logits = pop.teammates[i].logits;
    int state = game.initial_state;
    sg::Cell teammate_pos = spec.start;
    for (int t = 0; t < game.horizon; ++t) {
      const int a1 = argmax_action(br_logits, state);
      const int a2 = argmax_action(tm_logits, state);
      const auto [pos1, pos2] = sg::agent_positions(spec, state);
      teammate_pos = sg::apply_move(spec, pos2, a2);
      const sg::StepResult step = sg::step(game, state, a1, a2);
      state = step.next_state;
      if (state == game.terminal_state) break;  // positions freeze at the goal
    }
    if (spec.is_goal(teammate_pos)) {
      assignments.emplace_back(teammate_pos);
    } else {
      assignments.emplace_back(std::nullopt);
    }
  }
  return assignments;
}

policy::SoftmaxPolicy train_learner(
    const sg::TabularSG& game,
    const std::vector<policy::SoftmaxPolicy>& teammates,
    const trainer::TrainConfig& cfg) {
  if (teammates.empty()) {
    throw std::invalid_argument("train_learner requires at least one teammate");
  }
  for (const auto& t : teammates) {
    if (!t.matches(game)) {
      throw std::invalid_argument("teammate dimensions do not match the game");
    }
  }

  const auto& ops = kernels::active();
  policy::SoftmaxPolicy learner(game.num_joint_states, game.num_actions);
  {
    Rng rng(derive_seed(cfg.seed, seed_stream::kLearnerInit << 32));
    for (double& v : learner.logits.data) {
      v = rng.uniform(-cfg.init_scale, cfg.init_scale);
    }
  }

  const int n = static_cast<int>(learner.logits.size());
  Mat m = Mat::zeros(learner.logits.rows, learner.logits.cols);
  Mat v = Mat::zeros(learner.logits.rows, learner.logits.cols);
  const double weight = 1.0 / static_cast<double>(teammates.size());

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    Mat grad = Mat::zeros(learner.logits.rows, learner.logits.cols);
    for (const auto& teammate : teammates) {
      eval::PairGradient pg = eval::policy_gradient(game, learner, teammate);
      ops.axpy(weight, pg.grad_a.data.data(), grad.data.data(), n);
    }
    if (!grad.all_finite()) {
      throw NumericalError("non-finite learner gradient at iteration " +
                           std::to_string(iter - 1));
    }
    if (cfg.optimizer == trainer::Optimizer::kPlainSgd) {
      ops.axpy(cfg.learning_rate, grad.data.data(),
               learner.logits.data.data(), n);
    } else {
      const double bc1 = 1.0 - std::pow(cfg.adam.beta1, iter);
      const double bc2 = 1.0 - std::pow(cfg.adam.beta2, iter);
      ops.adam_step(learner.logits.data.data(), m.data.data(), v.data.data(),
                    grad.data.data(), n, cfg.learning_rate, cfg.adam.beta1,
                    cfg.adam.beta2, bc1, bc2, cfg.adam.epsilon);
    }
  }
  return learner;
}

RobustnessReport evaluate_robustness(
    const sg::TabularSG& game, const policy::SoftmaxPolicy& learner,
    const std::vector<policy::SoftmaxPolicy>& held_out) {
  if (held_out.empty()) {
    throw std::invalid_argument(
        "evaluate_robustness requires at least one held-out teammate");
  }
  RobustnessReport report;
  report.robustness = std::numeric_limits<double>::infinity();
  report.held_out_returns.reserve(held_out.size());
  for (const auto& teammate : held_out) {
    const double value = eval::evaluate_return(game, learner, teammate);
    report.held_out_returns.push_back(value);
    report.robustness = std::min(report.robustness, value);
  }
  return report;
}

}  // namespace brd::harness
