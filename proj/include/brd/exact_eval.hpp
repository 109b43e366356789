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

#ifndef BRD_EXACT_EVAL_HPP
#define BRD_EXACT_EVAL_HPP

#include <vector>

#include "brd/grid_world.hpp"
#include "brd/matrix.hpp"
#include "brd/policy.hpp"

namespace brd::eval {

// Exact expected discounted return of the joint policy (pi_a in the agent-1
// role, pi_b in the agent-2 role) from the initial state, by backward dynamic
// programming over joint states:
//   V_H = 0,  V_t(s) = sum_{a1,a2} pi_a(a1|s) pi_b(a2|s) [R + gamma V_{t+1}(s')]
double evaluate_return(const sg::TabularSG& game,
                       const policy::SoftmaxPolicy& pi_a,
                       const policy::SoftmaxPolicy& pi_b);

struct PairGradient {
  double value = 0.0;
  Mat grad_a;  // d value / d pi_a logits
  Mat grad_b;  // d value / d pi_b logits
};

// Exact gradient of evaluate_return with respect to both policies' logits
// via the finite-horizon policy-gradient theorem: a forward pass for the
// time-indexed occupancies, a backward pass for Q, and the softmax Jacobian
// folded into the accumulation.
PairGradient policy_gradient(const sg::TabularSG& game,
                             const policy::SoftmaxPolicy& pi_a,
                             const policy::SoftmaxPolicy& pi_b);

// Normalized discounted state-visitation distribution
//   d(s) ~ sum_{t=0}^{H-1} gamma^t Pr(s_t = s), scaled to sum to 1.
std::vector<double> occupancy_distribution(const sg::TabularSG& game,
                                           const policy::SoftmaxPolicy& pi_a,
                                           const policy::SoftmaxPolicy& pi_b);

// values(i, j) = return of best_responses[i] (agent 1) with teammates[j]
// (agent 2) from the initial state; per-entry gradients for both policies.
struct CrossPlayMatrix {
  Mat values;  // K x K
  // Indexed [i * K + j].
  std::vector<Mat> br_grads;        // d values(i,j) / d best_responses[i] logits
  std::vector<Mat> teammate_grads;  // d values(i,j) / d teammates[j] logits

  int size() const { return values.rows; }
};

CrossPlayMatrix cross_play_matrix(const sg::TabularSG& game,
                                  const policy::Population& pop,
                                  bool with_grads = true);

// Values-only variant for finite-difference probes and evaluation runs.
Mat cross_play_values(const sg::TabularSG& game,
                      const policy::Population& pop);

}  // namespace brd::eval

#endif  // BRD_EXACT_EVAL_HPP
