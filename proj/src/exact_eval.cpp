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

#include "brd/exact_eval.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "brd/kernels/kernels.hpp"

namespace brd::eval {
namespace {

void check_pair(const sg::TabularSG& game, const policy::SoftmaxPolicy& pi_a,
                const policy::SoftmaxPolicy& pi_b) {
  if (!pi_a.matches(game) || !pi_b.matches(game)) {
    throw std::invalid_argument(
        "policy dimensions do not match the game (expected " +
        std::to_string(game.num_joint_states) + "x" +
        std::to_string(game.num_actions) + ")");
  }
}

// Joint action distribution per state: joint[s][a1*A+a2] = pa(a1|s) pb(a2|s).
Mat joint_action_probs(const sg::TabularSG& game, const Mat& pa, const Mat& pb) {
  const auto& ops = kernels::active();
  const int ja = game.num_joint_actions();
  Mat joint(game.num_joint_states, ja);
  for (int s = 0; s < game.num_joint_states; ++s) {
    ops.outer(pa.row(s), game.num_actions, pb.row(s), game.num_actions,
              joint.row(s));
  }
  return joint;
}

// Backward value sweeps; returns V_t for t = 0..H (V_H = 0 last).
std::vector<std::vector<double>> value_table(const sg::TabularSG& game,
                                             const Mat& joint) {
  const auto& ops = kernels::active();
  const int S = game.num_joint_states;
  const int ja = game.num_joint_actions();
  std::vector<std::vector<double>> values(game.horizon + 1,
                                          std::vector<double>(S, 0.0));
  for (int t = game.horizon - 1; t >= 0; --t) {
    const std::vector<double>& vnext = values[t + 1];
    std::vector<double>& vt = values[t];
    for (int s = 0; s < S; ++s) {
      const std::size_t base = static_cast<std::size_t>(s) * ja;
      vt[s] = ops.expected_backup(joint.row(s), &game.reward[base],
                                  &game.next[base], vnext.data(),
                                  game.discount, ja);
    }
  }
  return values;
}

}  // namespace

double evaluate_return(const sg::TabularSG& game,
                       const policy::SoftmaxPolicy& pi_a,
                       const policy::SoftmaxPolicy& pi_b) {
  check_pair(game, pi_a, pi_b);
  const auto& ops = kernels::active();
  const int S = game.num_joint_states;
  const int ja = game.num_joint_actions();

  const Mat joint = joint_action_probs(game, pi_a.probs(), pi_b.probs());
  std::vector<double> v(S, 0.0);
  std::vector<double> vnew(S, 0.0);
  for (int t = game.horizon - 1; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      const std::size_t base = static_cast<std::size_t>(s) * ja;
      vnew[s] = ops.expected_backup(joint.row(s), &game.reward[base],
                                    &game.next[base], v.data(), game.discount,
                                    ja);
    }
    std::swap(v, vnew);
  }
  return v[game.initial_state];
}

PairGradient policy_gradient(const sg::TabularSG& game,
                             const policy::SoftmaxPolicy& pi_a,
                             const policy::SoftmaxPolicy& pi_b) {
  check_pair(game, pi_a, pi_b);
  const auto& ops = kernels::active();
  const int S = game.num_joint_states;
  const int A = game.num_actions;
  const int ja = game.num_joint_actions();

  const Mat pa = pi_a.probs();
  const Mat pb = pi_b.probs();
  const Mat joint = joint_action_probs(game, pa, pb);
  const auto values = value_table(game, joint);

  PairGradient out;
  out.value = values[0][game.initial_state];
  out.grad_a = Mat::zeros(S, A);
  out.grad_b = Mat::zeros(S, A);

  std::vector<double> occupancy(S, 0.0);
  std::vector<double> occupancy_next(S, 0.0);
  occupancy[game.initial_state] = 1.0;

  std::vector<double> q(ja);
  std::vector<double> qa(A);
  std::vector<double> qb(A);

  double gamma_pow = 1.0;
  for (int t = 0; t < game.horizon; ++t) {
    const std::vector<double>& vnext = values[t + 1];
    const std::vector<double>& vt = values[t];
    for (int s = 0; s < S; ++s) {
      const double ds = occupancy[s];
      if (ds == 0.0) continue;
      const std::size_t base = static_cast<std::size_t>(s) * ja;

      ops.gather_q(&game.reward[base], &game.next[base], vnext.data(),
                   game.discount, ja, q.data());
      ops.marginals(q.data(), pa.row(s), pb.row(s), A, A, qa.data(),
                    qb.data());

      const double weight = gamma_pow * ds;
      ops.pg_accum(pa.row(s), qa.data(), weight, vt[s], A, out.grad_a.row(s));
      ops.pg_accum(pb.row(s), qb.data(), weight, vt[s], A, out.grad_b.row(s));

      // Push occupancy mass forward; scatter stays scalar (conflicting
      // targets).
      const double* jrow = joint.row(s);
      for (int k = 0; k < ja; ++k) {
        occupancy_next[game.next[base + k]] += ds * jrow[k];
      }
    }
    std::swap(occupancy, occupancy_next);
    occupancy_next.assign(S, 0.0);
    gamma_pow *= game.discount;
  }
  return out;
}

std::vector<double> occupancy_distribution(const sg::TabularSG& game,
                                           const policy::SoftmaxPolicy& pi_a,
                                           const policy::SoftmaxPolicy& pi_b) {
  check_pair(game, pi_a, pi_b);
  const int S = game.num_joint_states;
  const int ja = game.num_joint_actions();

  const Mat joint = joint_action_probs(game, pi_a.probs(), pi_b.probs());
  std::vector<double> occupancy(S, 0.0);
  std::vector<double> occupancy_next(S, 0.0);
  std::vector<double> acc(S, 0.0);
  occupancy[game.initial_state] = 1.0;

  double gamma_pow = 1.0;
  for (int t = 0; t < game.horizon; ++t) {
    for (int s = 0; s < S; ++s) {
      const double ds = occupancy[s];
      if (ds == 0.0) continue;
      acc[s] += gamma_pow * ds;
      if (t + 1 < game.horizon) {
        const std::size_t base = static_cast<std::size_t>(s) * ja;
        const double* jrow = joint.row(s);
        for (int k = 0; k < ja; ++k) {
          occupancy_next[game.next[base + k]] += ds * jrow[k];
        }
      }
    }
    std::swap(occupancy, occupancy_next);
    occupancy_next.assign(S, 0.0);
    gamma_pow *= game.discount;
  }

  double total = 0.0;
  for (double v : acc) total += v;
  for (double& v : acc) v /= total;
  return acc;
}

CrossPlayMatrix cross_play_matrix(const sg::TabularSG& game,
                                  const policy::Population& pop,
                                  bool with_grads) {
  const int k = pop.size();
  if (k < 1 || static_cast<int>(pop.best_responses.size()) != k) {
    throw std::invalid_argument(
        "population must hold k >= 1 teammate/best-response pairs");
  }

  CrossPlayMatrix cpm;
  cpm.values = Mat(k, k);
  if (with_grads) {
    cpm.br_grads.resize(static_cast<std::size_t>(k) * k);
    cpm.teammate_grads.resize(static_cast<std::size_t>(k) * k);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (with_grads) {
        PairGradient pg =
            policy_gradient(game, pop.best_responses[i], pop.teammates[j]);
        cpm.values(i, j) = pg.value;
        cpm.br_grads[static_cast<std::size_t>(i) * k + j] = std::move(pg.grad_a);
        cpm.teammate_grads[static_cast<std::size_t>(i) * k + j] =
            std::move(pg.grad_b);
      } else {
        cpm.values(i, j) =
            evaluate_return(game, pop.best_responses[i], pop.teammates[j]);
      }
    }
  }
  return cpm;
}

Mat cross_play_values(const sg::TabularSG& game,
                      const policy::Population& pop) {
  return cross_play_matrix(game, pop, /*with_grads=*/false).values;
}

}  // namespace brd::eval
