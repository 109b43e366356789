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

#include "brd/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "brd/rng.hpp"

namespace brd::policy {

void softmax_row(const double* logits, int n, double* probs_out) {
  double max_logit = logits[0];
  for (int i = 1; i < n; ++i) max_logit = std::max(max_logit, logits[i]);
  if (!std::isfinite(max_logit)) {
    throw std::invalid_argument("softmax requires finite logits");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(logits[i])) {
      throw std::invalid_argument("softmax requires finite logits");
    }
    probs_out[i] = std::exp(logits[i] - max_logit);
    total += probs_out[i];
  }
  for (int i = 0; i < n; ++i) probs_out[i] /= total;
}

std::vector<double> softmax_probs(const std::vector<double>& logit_row) {
  if (logit_row.empty()) {
    throw std::invalid_argument("softmax of an empty logit row");
  }
  std::vector<double> probs(logit_row.size());
  softmax_row(logit_row.data(), static_cast<int>(logit_row.size()),
              probs.data());
  return probs;
}

Mat SoftmaxPolicy::probs() const {
  Mat p(logits.rows, logits.cols);
  for (int s = 0; s < logits.rows; ++s) {
    softmax_row(logits.row(s), logits.cols, p.row(s));
  }
  return p;
}

Population init_population(int k, const sg::TabularSG& game, double init_scale,
                           std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("population size k must be >= 1");
  if (init_scale < 0.0) {
    throw std::invalid_argument("init_scale must be non-negative");
  }

  Population pop;
  pop.teammates.reserve(k);
  pop.best_responses.reserve(k);

  const auto draw_policy = [&](std::uint64_t stream) {
    Rng rng(derive_seed(seed, stream));
    SoftmaxPolicy pi(game.num_joint_states, game.num_actions);
    for (double& v : pi.logits.data) {
      v = rng.uniform(-init_scale, init_scale);
    }
    return pi;
  };

  // Streams: teammate i uses 2i, its best response 2i+1, offset by the
  // population-init component id.
  for (int i = 0; i < k; ++i) {
    pop.teammates.push_back(
        draw_policy((seed_stream::kPopulationInit << 32) | (2 * i)));
    pop.best_responses.push_back(
        draw_policy((seed_stream::kPopulationInit << 32) | (2 * i + 1)));
  }
  return pop;
}

}  // namespace brd::policy
