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

#ifndef BRD_POLICY_HPP
#define BRD_POLICY_HPP

#include <cstdint>
#include <vector>

#include "brd/grid_world.hpp"
#include "brd/matrix.hpp"

namespace brd::policy {

// Tabular stochastic policy: one row of action logits per joint state.
// Probabilities are the row-wise softmax, so they are strictly positive.
struct SoftmaxPolicy {
  Mat logits;

  SoftmaxPolicy() = default;
  explicit SoftmaxPolicy(Mat l) : logits(std::move(l)) {}
  SoftmaxPolicy(int num_states, int num_actions)
      : logits(num_states, num_actions) {}

  int num_states() const { return logits.rows; }
  int num_actions() const { return logits.cols; }

  // Row-wise softmax of the logits.
  Mat probs() const;

  bool matches(const sg::TabularSG& game) const {
    return logits.rows == game.num_joint_states &&
           logits.cols == game.num_actions;
  }
};

// Numerically stable softmax (max-subtracted). Rejects non-finite logits.
std::vector<double> softmax_probs(const std::vector<double>& logit_row);
void softmax_row(const double* logits, int n, double* probs_out);

// K teammate policies paired with K best responses. The concatenation of all
// logits is the joint parameter vector the trainer ascends.
struct Population {
  std::vector<SoftmaxPolicy> teammates;
  std::vector<SoftmaxPolicy> best_responses;

  int size() const { return static_cast<int>(teammates.size()); }
};

// 2k policies with logits drawn i.i.d. uniform on [-init_scale, init_scale],
// deterministic in the seed.
Population init_population(int k, const sg::TabularSG& game, double init_scale,
                           std::uint64_t seed);

}  // namespace brd::policy

#endif  // BRD_POLICY_HPP
