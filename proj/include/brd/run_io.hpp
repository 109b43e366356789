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

#ifndef BRD_RUN_IO_HPP
#define BRD_RUN_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brd/grid_world.hpp"
#include "brd/matrix.hpp"
#include "brd/policy.hpp"
#include "brd/trainer.hpp"

namespace brd::io {

using json = nlohmann::ordered_json;

// Effective run configuration: the training setup plus the kernel backend
// request. Every field has a default; the echo materializes all of them.
struct RunConfig {
  trainer::TrainConfig train;
  std::string kernels = "auto";
};

// Parses a config object, applying defaults and rejecting unknown or
// ill-typed keys with a message naming the offending key.
RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);
json run_config_to_json(const RunConfig& cfg);

std::string method_name(trainer::Method m);
std::string optimizer_name(trainer::Optimizer o);
std::string div_grad_targets_name(trainer::DivGradTargets t);

// Checkpoint: environment spec, horizon/discount, and the population's
// logits with full round-trip precision. save -> load -> save is
// byte-identical.
struct Checkpoint {
  sg::GridWorldSpec env;
  int horizon = 10;
  double discount = 0.95;
  policy::Population population;
};

json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const json& j);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Delimiter-separated text renderings. Numbers are printed with %.17g so
// they survive a parse round trip exactly.
std::string metrics_to_csv(const std::vector<trainer::MetricRecord>& records);
std::string cross_play_to_csv(const Mat& values);
std::string format_double(double v);

// Atomic write: temp file in the target directory, then rename.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);
std::string read_text(const std::filesystem::path& path);
void write_json_atomic(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace brd::io

#endif  // BRD_RUN_IO_HPP
