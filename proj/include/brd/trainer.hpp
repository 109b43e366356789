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

#ifndef BRD_TRAINER_HPP
#define BRD_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brd/diversity.hpp"
#include "brd/exact_eval.hpp"
#include "brd/grid_world.hpp"
#include "brd/policy.hpp"

namespace brd::trainer {

enum class Optimizer { kPlainSgd, kAdaptiveMoments };
enum class Method { kBrDiversity, kJsdBaseline };

// Where the diversity term's gradient may flow. The trace term always
// updates both roles; restricting the det/JSD term to teammates prevents the
// population from inflating diversity by sabotaging off-diagonal
// best-response play instead of diversifying teammates.
enum class DivGradTargets { kAllParameters, kTeammatesOnly };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int k = 2;
  int iterations = 2000;
  double learning_rate = 0.05;
  Optimizer optimizer = Optimizer::kAdaptiveMoments;
  AdamParams adam;

  diversity::KernelConfig kernel;
  // Re-fit sigma^2 each iteration to the median pairwise squared row
  // distance of the current cross-play matrix (falls back to kernel.sigma
  // when the median is zero).
  bool median_heuristic = false;

  DivGradTargets div_grad_targets = DivGradTargets::kAllParameters;
  Method method = Method::kBrDiversity;
  double jsd_weight = 1.0;  // baseline only

  std::uint64_t seed = 1;
  int horizon = 10;
  double discount = 0.95;
  sg::GridWorldSpec env;
  double init_scale = 0.1;

  int log_every = 50;
  int checkpoint_every = 0;  // 0: no intermediate checkpoints
};

void validate(const TrainConfig& cfg);

struct MetricRecord {
  int iteration = 0;
  double trace = 0.0;
  double det_or_jsd = 0.0;  // det term, or the raw JSD score in baseline mode
  double objective = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainResult {
  policy::Population population;
  std::vector<MetricRecord> metrics;
  eval::CrossPlayMatrix final_matrix;
};

using CheckpointCallback =
    std::function<void(int iteration, const policy::Population&)>;

// Joint gradient ascent of all 2K policies on the configured objective.
// Deterministic given the seed; metrics are recorded before the update at
// every log_every-th iteration plus one final record.
TrainResult train_population(const TrainConfig& cfg,
                             const CheckpointCallback& on_checkpoint = {});

// Per-policy objective gradients assembled from per-entry cross-play
// gradients and the objective's gradient with respect to C. Exposed for the
// mode-zeroing tests; trace_grad is the identity part, div_grad the rest.
struct PolicyGradients {
  std::vector<Mat> teammates;
  std::vector<Mat> best_responses;
};
PolicyGradients chain_gradients(const eval::CrossPlayMatrix& cpm,
                                const Mat& grad_wrt_c,
                                DivGradTargets targets);

struct GradCheckCoordinate {
  bool is_best_response = false;
  int policy_index = 0;
  int state = 0;
  int action = 0;
};

struct GradCheckTrial {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  GradCheckCoordinate worst;
  int coords_checked = 0;
  int abs_fallback_count = 0;
};

struct GradCheckReport {
  std::vector<GradCheckTrial> trials;
  double max_rel_err = 0.0;
};

// Central finite differences of the end-to-end objective against the full
// chained analytic gradient on a random subset of at least min_coords
// coordinates per trial. Always checks the faithful all-parameters gradient;
// coordinates where both estimates are below 1e-8 in magnitude pass on the
// absolute fallback.
GradCheckReport finite_diff_check(const TrainConfig& cfg, int trials,
                                  int min_coords = 200);

}  // namespace brd::trainer

#endif  // BRD_TRAINER_HPP
