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

#include "brd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "brd/errors.hpp"
#include "brd/kernels/kernels.hpp"
#include "brd/rng.hpp"

namespace brd::trainer {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

diversity::KernelConfig effective_kernel(const TrainConfig& cfg,
                                         const Mat& values) {
  diversity::KernelConfig kcfg = cfg.kernel;
  if (!cfg.median_heuristic || values.rows < 2) return kcfg;

  std::vector<double> dists;
  for (int m = 0; m < values.rows; ++m) {
    for (int n = m + 1; n < values.rows; ++n) {
      double acc = 0.0;
      for (int j = 0; j < values.cols; ++j) {
        const double d = values(m, j) - values(n, j);
        acc += d * d;
      }
      dists.push_back(acc);
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  const double median = (dists.size() % 2 == 1)
                            ? dists[mid]
                            : 0.5 * (dists[mid - 1] + dists[mid]);
  if (median > 0.0) kcfg.sigma = std::sqrt(median);
  return kcfg;
}

// Discounted-time normalizer of the occupancy distribution.
double occupancy_mass(const sg::TabularSG& game) {
  double z = 0.0;
  double gamma_pow = 1.0;
  for (int t = 0; t < game.horizon; ++t) {
    z += gamma_pow;
    gamma_pow *= game.discount;
  }
  return z;
}

// Gradient of  sum_t gamma^t E[phi(s_t)]  with respect to both policies'
// logits, obtained by running the exact policy gradient on a shadow game
// whose transition reward is gamma * phi(successor) over horizon H-1.
eval::PairGradient state_functional_gradient(const sg::TabularSG& game,
                                             const std::vector<double>& phi,
                                             const policy::SoftmaxPolicy& pi_a,
                                             const policy::SoftmaxPolicy& pi_b) {
  sg::TabularSG shadow = game;
  shadow.horizon = game.horizon - 1;
  shadow.grid.reset();
  for (std::size_t idx = 0; idx < shadow.reward.size(); ++idx) {
    shadow.reward[idx] = game.discount * phi[shadow.next[idx]];
  }
  return eval::policy_gradient(shadow, pi_a, pi_b);
}

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
};

class PopulationOptimizer {
 public:
  PopulationOptimizer(const TrainConfig& cfg, const policy::Population& pop)
      : cfg_(cfg) {
    if (cfg.optimizer == Optimizer::kAdaptiveMoments) {
      const auto init_like = [](const std::vector<policy::SoftmaxPolicy>& ps) {
        std::vector<Mat> ms;
        ms.reserve(ps.size());
        for (const auto& p : ps) ms.push_back(Mat::zeros(p.logits.rows, p.logits.cols));
        return ms;
      };
      teammates_.m = init_like(pop.teammates);
      teammates_.v = init_like(pop.teammates);
      best_responses_.m = init_like(pop.best_responses);
      best_responses_.v = init_like(pop.best_responses);
    }
  }

  void step(policy::Population& pop, const PolicyGradients& grads) {
    ++steps_;
    const auto& ops = kernels::active();
    if (cfg_.optimizer == Optimizer::kPlainSgd) {
      for (int i = 0; i < pop.size(); ++i) {
        ops.axpy(cfg_.learning_rate, grads.teammates[i].data.data(),
                 pop.teammates[i].logits.data.data(),
                 static_cast<int>(grads.teammates[i].size()));
        ops.axpy(cfg_.learning_rate, grads.best_responses[i].data.data(),
                 pop.best_responses[i].logits.data.data(),
                 static_cast<int>(grads.best_responses[i].size()));
      }
      return;
    }
    const double bc1 = 1.0 - std::pow(cfg_.adam.beta1, steps_);
    const double bc2 = 1.0 - std::pow(cfg_.adam.beta2, steps_);
    for (int i = 0; i < pop.size(); ++i) {
      ops.adam_step(pop.teammates[i].logits.data.data(),
                    teammates_.m[i].data.data(), teammates_.v[i].data.data(),
                    grads.teammates[i].data.data(),
                    static_cast<int>(grads.teammates[i].size()),
                    cfg_.learning_rate, cfg_.adam.beta1, cfg_.adam.beta2, bc1,
                    bc2, cfg_.adam.epsilon);
      ops.adam_step(pop.best_responses[i].logits.data.data(),
                    best_responses_.m[i].data.data(),
                    best_responses_.v[i].data.data(),
                    grads.best_responses[i].data.data(),
                    static_cast<int>(grads.best_responses[i].size()),
                    cfg_.learning_rate, cfg_.adam.beta1, cfg_.adam.beta2, bc1,
                    bc2, cfg_.adam.epsilon);
    }
  }

 private:
  const TrainConfig& cfg_;
  AdamState teammates_;
  AdamState best_responses_;
  int steps_ = 0;
};

struct IterationEval {
  eval::CrossPlayMatrix cpm;
  double trace = 0.0;
  double det_or_jsd = 0.0;
  double objective_total = 0.0;
  PolicyGradients grads;
};

void check_finite(const PolicyGradients& grads, int iteration) {
  const auto finite = [](const std::vector<Mat>& ms) {
    for (const Mat& m : ms) {
      if (!m.all_finite()) return false;
    }
    return true;
  };
  if (!finite(grads.teammates) || !finite(grads.best_responses)) {
    throw NumericalError("non-finite policy gradient at iteration " +
                         std::to_string(iteration));
  }
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("k must be >= 1");
  if (cfg.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (cfg.log_every < 1) throw std::invalid_argument("log_every must be >= 1");
  if (cfg.checkpoint_every < 0) {
    throw std::invalid_argument("checkpoint_every must be >= 0");
  }
  if (!(cfg.kernel.sigma > 0.0)) {
    throw std::invalid_argument("kernel.sigma must be > 0");
  }
  if (cfg.kernel.jitter < 0.0) {
    throw std::invalid_argument("kernel.jitter must be >= 0");
  }
  if (cfg.method == Method::kJsdBaseline && cfg.k < 2) {
    throw std::invalid_argument("jsd-baseline requires k >= 2");
  }
  if (cfg.init_scale < 0.0) {
    throw std::invalid_argument("init_scale must be >= 0");
  }
}

PolicyGradients chain_gradients(const eval::CrossPlayMatrix& cpm,
                                const Mat& grad_wrt_c,
                                DivGradTargets targets) {
  const auto& ops = kernels::active();
  const int k = cpm.size();
  PolicyGradients out;
  out.teammates.reserve(k);
  out.best_responses.reserve(k);
  for (int i = 0; i < k; ++i) {
    const Mat& shape = cpm.br_grads[static_cast<std::size_t>(i) * k + i];
    out.teammates.push_back(Mat::zeros(shape.rows, shape.cols));
    out.best_responses.push_back(Mat::zeros(shape.rows, shape.cols));
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const std::size_t e = static_cast<std::size_t>(i) * k + j;
      const double w = grad_wrt_c(i, j);
      const double w_br =
          (targets == DivGradTargets::kTeammatesOnly) ? (i == j ? 1.0 : 0.0) : w;
      const int n = static_cast<int>(cpm.br_grads[e].size());
      if (w_br != 0.0) {
        ops.axpy(w_br, cpm.br_grads[e].data.data(),
                 out.best_responses[i].data.data(), n);
      }
      if (w != 0.0) {
        ops.axpy(w, cpm.teammate_grads[e].data.data(),
                 out.teammates[j].data.data(), n);
      }
    }
  }
  return out;
}

namespace {

// One full evaluation of the configured objective and its policy gradients
// at the current population.
IterationEval evaluate_iteration(const TrainConfig& cfg,
                                 const sg::TabularSG& game,
                                 const policy::Population& pop) {
  IterationEval ev;
  ev.cpm = eval::cross_play_matrix(game, pop, /*with_grads=*/true);
  for (int i = 0; i < ev.cpm.size(); ++i) ev.trace += ev.cpm.values(i, i);

  if (cfg.method == Method::kBrDiversity) {
    const diversity::KernelConfig kcfg = effective_kernel(cfg, ev.cpm.values);
    const diversity::ObjectiveValue obj =
        diversity::objective(ev.cpm.values, kcfg);
    const Mat g = diversity::objective_grad_wrt_c(ev.cpm.values, kcfg);
    ev.det_or_jsd = obj.det_term;
    ev.objective_total = obj.total;
    ev.grads = chain_gradients(ev.cpm, g, cfg.div_grad_targets);
    return ev;
  }

  // JSD baseline: trace plus beta times the mean pairwise JSD of the
  // self-play occupancy distributions.
  const int k = ev.cpm.size();
  std::vector<std::vector<double>> occupancies(k);
  for (int i = 0; i < k; ++i) {
    occupancies[i] = eval::occupancy_distribution(game, pop.best_responses[i],
                                                  pop.teammates[i]);
  }
  const double score = diversity::jsd_population_score(occupancies);
  ev.det_or_jsd = score;
  ev.objective_total = ev.trace + cfg.jsd_weight * score;

  // Trace part: identity weights over the diagonal entries.
  Mat identity(k, k);
  for (int i = 0; i < k; ++i) identity(i, i) = 1.0;
  ev.grads = chain_gradients(ev.cpm, identity, DivGradTargets::kAllParameters);

  const auto phi = diversity::jsd_population_score_grad(occupancies);
  const double inv_mass = 1.0 / occupancy_mass(game);
  const auto& ops = kernels::active();
  for (int i = 0; i < k; ++i) {
    eval::PairGradient shadow = state_functional_gradient(
        game, phi[i], pop.best_responses[i], pop.teammates[i]);
    const double w = cfg.jsd_weight * inv_mass;
    ops.axpy(w, shadow.grad_b.data.data(), ev.grads.teammates[i].data.data(),
             static_cast<int>(shadow.grad_b.size()));
    if (cfg.div_grad_targets == DivGradTargets::kAllParameters) {
      ops.axpy(w, shadow.grad_a.data.data(),
               ev.grads.best_responses[i].data.data(),
               static_cast<int>(shadow.grad_a.size()));
    }
  }
  return ev;
}

}  // namespace

TrainResult train_population(const TrainConfig& cfg,
                             const CheckpointCallback& on_checkpoint) {
  validate(cfg);
  const auto start = Clock::now();
  const sg::TabularSG game =
      sg::build_gridworld(cfg.env, cfg.horizon, cfg.discount);

  TrainResult result;
  result.population =
      policy::init_population(cfg.k, game, cfg.init_scale, cfg.seed);
  PopulationOptimizer optimizer(cfg, result.population);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    IterationEval ev;
    try {
      ev = evaluate_iteration(cfg, game, result.population);
    } catch (const NumericalError& err) {
      throw NumericalError(std::string(err.what()) + " (iteration " +
                           std::to_string(iter) + ")");
    }
    if (iter % cfg.log_every == 0) {
      result.metrics.push_back({iter, ev.trace, ev.det_or_jsd,
                                ev.objective_total, seconds_since(start)});
    }
    if (cfg.checkpoint_every > 0 && iter > 0 &&
        iter % cfg.checkpoint_every == 0 && on_checkpoint) {
      on_checkpoint(iter, result.population);
    }
    check_finite(ev.grads, iter);
    optimizer.step(result.population, ev.grads);
  }

  // Final record reflects the population after the last update.
  IterationEval final_ev = evaluate_iteration(cfg, game, result.population);
  result.metrics.push_back({cfg.iterations, final_ev.trace,
                            final_ev.det_or_jsd, final_ev.objective_total,
                            seconds_since(start)});
  result.final_matrix = std::move(final_ev.cpm);
  if (on_checkpoint) on_checkpoint(cfg.iterations, result.population);
  return result;
}

GradCheckReport finite_diff_check(const TrainConfig& cfg, int trials,
                                  int min_coords) {
  validate(cfg);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const sg::TabularSG game =
      sg::build_gridworld(cfg.env, cfg.horizon, cfg.discount);

  // End-to-end objective, evaluated without gradients.
  const auto objective_of = [&](const policy::Population& pop) {
    const Mat values = eval::cross_play_values(game, pop);
    if (cfg.method == Method::kBrDiversity) {
      return diversity::objective(values, cfg.kernel).total;
    }
    std::vector<std::vector<double>> occupancies(pop.size());
    for (int i = 0; i < pop.size(); ++i) {
      occupancies[i] = eval::occupancy_distribution(
          game, pop.best_responses[i], pop.teammates[i]);
    }
    double trace = 0.0;
    for (int i = 0; i < values.rows; ++i) trace += values(i, i);
    return trace + cfg.jsd_weight * diversity::jsd_population_score(occupancies);
  };

  GradCheckReport report;
  const double h = 1e-5;
  for (int trial = 0; trial < trials; ++trial) {
    policy::Population pop = policy::init_population(
        cfg.k, game, cfg.init_scale,
        derive_seed(cfg.seed, (seed_stream::kGradCheck << 32) | trial));

    TrainConfig full = cfg;
    full.div_grad_targets = DivGradTargets::kAllParameters;
    full.median_heuristic = false;
    const PolicyGradients analytic = evaluate_iteration(full, game, pop).grads;

    const int per_policy = game.num_joint_states * game.num_actions;
    const std::size_t total =
        static_cast<std::size_t>(2) * cfg.k * per_policy;
    const int n_coords =
        static_cast<int>(std::min<std::size_t>(total, min_coords));

    Rng rng(derive_seed(cfg.seed, (seed_stream::kGradCheck << 32) | 0x1000 |
                                      static_cast<std::uint64_t>(trial)));
    GradCheckTrial t;
    t.coords_checked = n_coords;
    for (int c = 0; c < n_coords; ++c) {
      const bool is_br = rng.uniform() < 0.5;
      const int pi = static_cast<int>(rng.uniform() * cfg.k);
      const int flat = static_cast<int>(rng.uniform() * per_policy);
      const int state = flat / game.num_actions;
      const int action = flat % game.num_actions;

      Mat& logits = is_br ? pop.best_responses[pi].logits
                          : pop.teammates[pi].logits;
      const double saved = logits(state, action);
      logits(state, action) = saved + h;
      const double f_plus = objective_of(pop);
      logits(state, action) = saved - h;
      const double f_minus = objective_of(pop);
      logits(state, action) = saved;

      const double fd = (f_plus - f_minus) / (2.0 * h);
      const Mat& grad = is_br ? analytic.best_responses[pi]
                              : analytic.teammates[pi];
      const double an = grad(state, action);

      const double abs_err = std::abs(an - fd);
      t.max_abs_err = std::max(t.max_abs_err, abs_err);
      if (std::abs(an) <= 1e-8 && std::abs(fd) <= 1e-8) {
        ++t.abs_fallback_count;
        continue;
      }
      const double rel = abs_err / std::max(std::abs(an), std::abs(fd));
      if (rel > t.max_rel_err) {
        t.max_rel_err = rel;
        t.worst = {is_br, pi, state, action};
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, t.max_rel_err);
    report.trials.push_back(t);
  }
  return report;
}

}  // namespace brd::trainer
