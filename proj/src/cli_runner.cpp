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

#include "brd/cli_runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "brd/errors.hpp"
#include "brd/exact_eval.hpp"
#include "brd/harness.hpp"
#include "brd/kernels/kernels.hpp"
#include "brd/run_io.hpp"
#include "brd/trainer.hpp"

namespace brd::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

constexpr const char* kHorizonNote =
    "Returns are finite-horizon discounted values; the grid reward pays once "
    "and absorbs, so every return lies in [0, 1].";

json cell_json(const std::optional<sg::Cell>& c) {
  if (!c.has_value()) return nullptr;
  return json::array({c->row, c->col});
}

json assignments_json(const std::vector<std::optional<sg::Cell>>& assignments) {
  json arr = json::array();
  for (const auto& a : assignments) arr.push_back(cell_json(a));
  return arr;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir.string() +
                  "': " + ec.message());
  }
}

// Shared by generate and sweep: trains one population and writes the full
// artifact set into dir. Returns the summary document.
json generate_into(io::RunConfig cfg, const fs::path& dir) {
  ensure_out_dir(dir);
  cfg.kernels = kernels::set_backend(cfg.kernels);
  io::write_json_atomic(dir / "config_echo.json", io::run_config_to_json(cfg));

  const auto checkpoint_cb = [&](int iteration, const policy::Population& pop) {
    if (iteration >= cfg.train.iterations) return;  // final one is written below
    io::save_checkpoint(
        dir / ("checkpoint_" + std::to_string(iteration) + ".json"),
        {cfg.train.env, cfg.train.horizon, cfg.train.discount, pop});
  };

  trainer::TrainResult result =
      trainer::train_population(cfg.train, checkpoint_cb);

  io::write_text_atomic(dir / "metrics.csv", io::metrics_to_csv(result.metrics));
  io::write_text_atomic(dir / "cross_play.csv",
                        io::cross_play_to_csv(result.final_matrix.values));
  io::save_checkpoint(dir / "checkpoint.json",
                      {cfg.train.env, cfg.train.horizon, cfg.train.discount,
                       result.population});

  const sg::TabularSG game =
      sg::build_gridworld(cfg.train.env, cfg.train.horizon, cfg.train.discount);
  const auto assignments = harness::corner_assignment(game, result.population);
  const trainer::MetricRecord& final_record = result.metrics.back();

  json diag = json::array();
  for (int i = 0; i < result.final_matrix.size(); ++i) {
    diag.push_back(result.final_matrix.values(i, i));
  }

  json summary;
  summary["command"] = "generate";
  summary["method"] = io::method_name(cfg.train.method);
  summary["seed"] = cfg.train.seed;
  summary["kernel_backend"] = cfg.kernels;
  summary["div_grad_targets"] =
      io::div_grad_targets_name(cfg.train.div_grad_targets);
  summary["iterations"] = cfg.train.iterations;
  summary["horizon"] = cfg.train.horizon;
  summary["discount"] = cfg.train.discount;
  summary["horizon_discount_note"] = kHorizonNote;
  summary["trace"] = final_record.trace;
  summary["det_or_jsd"] = final_record.det_or_jsd;
  summary["objective"] = final_record.objective;
  summary["elapsed_seconds"] = final_record.elapsed_seconds;
  summary["cross_play"] = matrix_json(result.final_matrix.values);
  summary["diagonal"] = diag;
  summary["corner_assignments"] = assignments_json(assignments);
  summary["population_kind"] =
      population_kind_name(classify_assignments(assignments));
  io::write_json_atomic(dir / "summary.json", summary);
  return summary;
}

int run_generate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  io::RunConfig cfg = io::load_run_config(config_path);
  if (seed_override.has_value()) cfg.train.seed = *seed_override;
  const json summary = generate_into(cfg, out_dir);
  std::cout << "generate: seed " << summary["seed"].get<std::uint64_t>()
            << " objective " << summary["objective"].get<double>() << " ("
            << summary["population_kind"].get<std::string>() << ") -> "
            << out_dir << "\n";
  return 0;
}

int run_evaluate(const std::string& ckpt_path, const std::string& out_dir,
                 const std::string& kernels_name) {
  const io::Checkpoint ckpt = io::load_checkpoint(ckpt_path);
  const std::string resolved = kernels::set_backend(kernels_name);
  const sg::TabularSG game =
      sg::build_gridworld(ckpt.env, ckpt.horizon, ckpt.discount);

  const Mat values = eval::cross_play_values(game, ckpt.population);
  const auto assignments = harness::corner_assignment(game, ckpt.population);

  ensure_out_dir(out_dir);
  const fs::path dir(out_dir);
  json echo;
  echo["command"] = "evaluate";
  echo["checkpoint"] = ckpt_path;
  echo["kernels"] = resolved;
  io::write_json_atomic(dir / "config_echo.json", echo);
  io::write_text_atomic(dir / "cross_play.csv", io::cross_play_to_csv(values));

  double trace = 0.0;
  json diag = json::array();
  for (int i = 0; i < values.rows; ++i) {
    trace += values(i, i);
    diag.push_back(values(i, i));
  }
  json summary;
  summary["command"] = "evaluate";
  summary["kernel_backend"] = resolved;
  summary["horizon"] = ckpt.horizon;
  summary["discount"] = ckpt.discount;
  summary["horizon_discount_note"] = kHorizonNote;
  summary["trace"] = trace;
  summary["cross_play"] = matrix_json(values);
  summary["diagonal"] = diag;
  summary["corner_assignments"] = assignments_json(assignments);
  summary["population_kind"] =
      population_kind_name(classify_assignments(assignments));
  io::write_json_atomic(dir / "summary.json", summary);
  std::cout << "evaluate: trace " << trace << " ("
            << summary["population_kind"].get<std::string>() << ") -> "
            << out_dir << "\n";
  return 0;
}

int run_learner(const std::string& ckpt_path, const std::string& out_dir,
                int iterations, double learning_rate, std::uint64_t seed,
                double init_scale, const std::string& kernels_name) {
  const io::Checkpoint ckpt = io::load_checkpoint(ckpt_path);
  const std::string resolved = kernels::set_backend(kernels_name);
  const sg::TabularSG game =
      sg::build_gridworld(ckpt.env, ckpt.horizon, ckpt.discount);

  trainer::TrainConfig lcfg;
  lcfg.iterations = iterations;
  lcfg.learning_rate = learning_rate;
  lcfg.seed = seed;
  lcfg.init_scale = init_scale;
  lcfg.env = ckpt.env;
  lcfg.horizon = ckpt.horizon;
  lcfg.discount = ckpt.discount;

  const policy::SoftmaxPolicy learner =
      harness::train_learner(game, ckpt.population.teammates, lcfg);

  std::vector<policy::SoftmaxPolicy> held_out;
  json held_out_names = json::array();
  for (const sg::Cell& goal : ckpt.env.goals) {
    held_out.push_back(harness::make_corner_expert(game, goal));
    held_out_names.push_back(cell_json(goal));
  }
  const harness::RobustnessReport report =
      harness::evaluate_robustness(game, learner, held_out);
  const auto assignments = harness::corner_assignment(game, ckpt.population);

  ensure_out_dir(out_dir);
  const fs::path dir(out_dir);
  json echo;
  echo["command"] = "learner";
  echo["checkpoint"] = ckpt_path;
  echo["iterations"] = iterations;
  echo["learning_rate"] = learning_rate;
  echo["seed"] = seed;
  echo["init_scale"] = init_scale;
  echo["kernels"] = resolved;
  io::write_json_atomic(dir / "config_echo.json", echo);

  json learner_doc;
  learner_doc["version"] = 1;
  learner_doc["env"] = io::checkpoint_to_json(ckpt)["env"];
  learner_doc["horizon"] = ckpt.horizon;
  learner_doc["discount"] = ckpt.discount;
  learner_doc["learner_logits"] = json::array();
  for (int r = 0; r < learner.logits.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < learner.logits.cols; ++c) {
      row.push_back(learner.logits(r, c));
    }
    learner_doc["learner_logits"].push_back(std::move(row));
  }
  io::write_json_atomic(dir / "learner.json", learner_doc);

  json summary;
  summary["command"] = "learner";
  summary["kernel_backend"] = resolved;
  summary["iterations"] = iterations;
  summary["horizon_discount_note"] = kHorizonNote;
  summary["held_out_corners"] = held_out_names;
  summary["held_out_returns"] = report.held_out_returns;
  summary["robustness"] = report.robustness;
  summary["population_corner_assignments"] = assignments_json(assignments);
  summary["population_kind"] =
      population_kind_name(classify_assignments(assignments));
  io::write_json_atomic(dir / "summary.json", summary);
  std::cout << "learner: robustness " << report.robustness << " -> " << out_dir
            << "\n";
  return 0;
}

int run_gradcheck(const std::string& config_path, int trials, double tol,
                  const std::string& out_dir) {
  io::RunConfig cfg = io::load_run_config(config_path);
  cfg.kernels = kernels::set_backend(cfg.kernels);

  const trainer::GradCheckReport report =
      trainer::finite_diff_check(cfg.train, trials);

  json trials_json = json::array();
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const trainer::GradCheckTrial& t = report.trials[i];
    json tj;
    tj["trial"] = i;
    tj["max_rel_err"] = t.max_rel_err;
    tj["max_abs_err"] = t.max_abs_err;
    tj["coords_checked"] = t.coords_checked;
    tj["abs_fallback_count"] = t.abs_fallback_count;
    tj["worst_coordinate"] = {
        {"role", t.worst.is_best_response ? "best_response" : "teammate"},
        {"policy", t.worst.policy_index},
        {"state", t.worst.state},
        {"action", t.worst.action}};
    trials_json.push_back(std::move(tj));
    std::cout << "gradcheck trial " << i << ": max rel err " << t.max_rel_err
              << " (abs fallback on " << t.abs_fallback_count << "/"
              << t.coords_checked << " coords)\n";
  }
  std::cout << "gradcheck: max rel err " << report.max_rel_err
            << " over " << report.trials.size() << " trials (tolerance " << tol
            << ")\n";

  if (!out_dir.empty()) {
    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    io::write_json_atomic(dir / "config_echo.json", io::run_config_to_json(cfg));
    json doc;
    doc["command"] = "gradcheck";
    doc["trials"] = trials_json;
    doc["max_rel_err"] = report.max_rel_err;
    doc["tolerance"] = tol;
    io::write_json_atomic(dir / "report.json", doc);
  }
  if (report.max_rel_err > tol) {
    std::cerr << "gradcheck failed: " << report.max_rel_err << " > " << tol
              << "\n";
    return 3;
  }
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              int count, const std::string& seeds_csv) {
  io::RunConfig base = io::load_run_config(config_path);
  base.kernels = kernels::set_backend(base.kernels);

  std::vector<std::uint64_t> seeds;
  if (!seeds_csv.empty()) {
    std::stringstream ss(seeds_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        seeds.push_back(std::stoull(token));
      } catch (const std::exception&) {
        throw ConfigError("invalid seed '" + token + "' in --seeds");
      }
    }
    if (seeds.empty()) throw ConfigError("--seeds parsed to an empty list");
  } else {
    if (count < 1) throw ConfigError("--count must be >= 1");
    for (int i = 0; i < count; ++i) seeds.push_back(base.train.seed + i);
  }

  ensure_out_dir(out_dir);
  const fs::path dir(out_dir);
  io::write_json_atomic(dir / "config_echo.json", io::run_config_to_json(base));

  int split = 0, same = 0, degenerate = 0;
  json per_seed = json::array();
  for (std::uint64_t seed : seeds) {
    io::RunConfig cfg = base;
    cfg.train.seed = seed;
    const json summary = generate_into(cfg, dir / ("seed_" + std::to_string(seed)));
    const std::string kind = summary["population_kind"].get<std::string>();
    if (kind == "corner-split") ++split;
    if (kind == "same-corner") ++same;
    if (kind == "degenerate") ++degenerate;
    per_seed.push_back({{"seed", seed},
                        {"population_kind", kind},
                        {"corner_assignments", summary["corner_assignments"]},
                        {"diagonal", summary["diagonal"]},
                        {"objective", summary["objective"]}});
    std::cout << "sweep seed " << seed << ": " << kind << "\n";
  }

  json summary;
  summary["command"] = "sweep";
  summary["method"] = io::method_name(base.train.method);
  summary["kernel_backend"] = base.kernels;
  summary["seeds"] = seeds;
  summary["corner_split_count"] = split;
  summary["same_corner_count"] = same;
  summary["degenerate_count"] = degenerate;
  summary["per_seed"] = per_seed;
  io::write_json_atomic(dir / "summary.json", summary);
  std::cout << "sweep: " << split << "/" << seeds.size() << " corner-split, "
            << same << " same-corner, " << degenerate << " degenerate -> "
            << out_dir << "\n";
  return 0;
}

}  // namespace

PopulationKind classify_assignments(
    const std::vector<std::optional<sg::Cell>>& assignments) {
  for (const auto& a : assignments) {
    if (!a.has_value()) return PopulationKind::kDegenerate;
  }
  for (std::size_t i = 1; i < assignments.size(); ++i) {
    if (!(*assignments[i] == *assignments[0])) {
      return PopulationKind::kCornerSplit;
    }
  }
  return PopulationKind::kSameCorner;
}

std::string population_kind_name(PopulationKind kind) {
  switch (kind) {
    case PopulationKind::kCornerSplit: return "corner-split";
    case PopulationKind::kSameCorner: return "same-corner";
    case PopulationKind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

int execute(const std::vector<std::string>& args) {
  CLI::App app{"Diverse-teammate population generator for ad hoc teamwork"};
  app.name("brdgen");
  app.require_subcommand(1);

  std::string config_path, out_dir, ckpt_path, kernels_name = "auto";
  std::string seeds_csv;
  std::uint64_t seed = 1;
  bool has_seed_override = false;
  int trials = 10, count = 10, iterations = 2000;
  double tol = 1e-4, learning_rate = 0.05, init_scale = 0.1;

  CLI::App* generate = app.add_subcommand(
      "generate", "Train a teammate population (br-diversity or jsd-baseline)");
  generate->add_option("--config", config_path, "Run configuration (JSON)")
      ->required();
  generate->add_option("--out", out_dir, "Output directory")->required();
  generate->add_option("--seed", seed, "Override the config seed")
      ->each([&](const std::string&) { has_seed_override = true; });

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Recompute cross-play and corner assignments from a checkpoint");
  evaluate->add_option("--checkpoint", ckpt_path, "Population checkpoint")
      ->required();
  evaluate->add_option("--out", out_dir, "Output directory")->required();
  evaluate->add_option("--kernels", kernels_name, "auto|scalar|avx2");

  CLI::App* learner = app.add_subcommand(
      "learner", "Train a learner against a checkpointed population and "
                 "evaluate robustness against corner experts");
  learner->add_option("--checkpoint", ckpt_path, "Population checkpoint")
      ->required();
  learner->add_option("--out", out_dir, "Output directory")->required();
  learner->add_option("--iterations", iterations, "Learner training iterations");
  learner->add_option("--learning-rate", learning_rate, "Learner learning rate");
  learner->add_option("--seed", seed, "Learner init seed");
  learner->add_option("--init-scale", init_scale, "Learner logit init scale");
  learner->add_option("--kernels", kernels_name, "auto|scalar|avx2");

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "Compare the chained analytic gradient to central finite "
                   "differences");
  gradcheck->add_option("--config", config_path, "Run configuration (JSON)")
      ->required();
  gradcheck->add_option("--trials", trials, "Randomized trials");
  gradcheck->add_option("--tol", tol, "Max relative error tolerance");
  gradcheck->add_option("--out", out_dir, "Optional report directory");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run generate across a seed list and aggregate corner-split "
               "statistics");
  sweep->add_option("--config", config_path, "Run configuration (JSON)")
      ->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--count", count, "Number of consecutive seeds");
  sweep->add_option("--seeds", seeds_csv, "Comma-separated explicit seed list");

  std::vector<const char*> argv;
  argv.push_back("brdgen");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      return run_generate(config_path, out_dir,
                          has_seed_override
                              ? std::optional<std::uint64_t>(seed)
                              : std::nullopt);
    }
    if (evaluate->parsed()) {
      return run_evaluate(ckpt_path, out_dir, kernels_name);
    }
    if (learner->parsed()) {
      return run_learner(ckpt_path, out_dir, iterations, learning_rate, seed,
                         init_scale, kernels_name);
    }
    if (gradcheck->parsed()) {
      return run_gradcheck(config_path, trials, tol, out_dir);
    }
    if (sweep->parsed()) {
      return run_sweep(config_path, out_dir, count, seeds_csv);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace brd::cli
