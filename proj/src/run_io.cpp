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

#include "brd/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "brd/errors.hpp"

namespace brd::io {
namespace {

// Tracks which keys of an object were consumed so typos are rejected with
// the offending key named.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix)
      : obj_(j), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) {
      throw ConfigError("config key '" + display_prefix() +
                        "': expected an object");
    }
  }

  bool has(const std::string& key) {
    known_.push_back(key);
    return obj_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    known_.push_back(key);
    if (!obj_.contains(key)) return fallback;
    return convert<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    known_.push_back(key);
    if (!obj_.contains(key)) {
      throw ConfigError("config key '" + qualified(key) + "' is required");
    }
    return convert<T>(key);
  }

  const json& raw(const std::string& key) {
    known_.push_back(key);
    return obj_.at(key);
  }

  std::string qualified(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      bool found = false;
      for (const auto& k : known_) {
        if (k == item.key()) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw ConfigError("unknown config key '" + qualified(item.key()) + "'");
      }
    }
  }

 private:
  std::string display_prefix() const {
    return prefix_.empty() ? "<root>" : prefix_;
  }

  template <typename T>
  T convert(const std::string& key) {
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + qualified(key) +
                        "' has the wrong type");
    }
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string> known_;
};

sg::Cell parse_cell(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw ConfigError("config key '" + key + "': expected [row, col]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

json cell_to_json(sg::Cell c) { return json::array({c.row, c.col}); }

Mat logits_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("checkpoint key '" + key +
                      "': expected a non-empty 2d array");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ConfigError("checkpoint key '" + key + "': ragged logit rows");
    }
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ConfigError("checkpoint key '" + key + "': non-numeric logit");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

json logits_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

trainer::Method parse_method(const std::string& s) {
  if (s == "br-diversity") return trainer::Method::kBrDiversity;
  if (s == "jsd-baseline") return trainer::Method::kJsdBaseline;
  throw ConfigError(
      "config key 'method': expected br-diversity or jsd-baseline, got '" + s +
      "'");
}

trainer::Optimizer parse_optimizer(const std::string& s) {
  if (s == "plain-sgd") return trainer::Optimizer::kPlainSgd;
  if (s == "adaptive-moments") return trainer::Optimizer::kAdaptiveMoments;
  throw ConfigError(
      "config key 'optimizer': expected plain-sgd or adaptive-moments, got '" +
      s + "'");
}

trainer::DivGradTargets parse_targets(const std::string& s) {
  if (s == "all-parameters") return trainer::DivGradTargets::kAllParameters;
  if (s == "teammates-only") return trainer::DivGradTargets::kTeammatesOnly;
  throw ConfigError(
      "config key 'div_grad_targets': expected all-parameters or "
      "teammates-only, got '" +
      s + "'");
}

}  // namespace

std::string method_name(trainer::Method m) {
  return m == trainer::Method::kBrDiversity ? "br-diversity" : "jsd-baseline";
}

std::string optimizer_name(trainer::Optimizer o) {
  return o == trainer::Optimizer::kPlainSgd ? "plain-sgd" : "adaptive-moments";
}

std::string div_grad_targets_name(trainer::DivGradTargets t) {
  return t == trainer::DivGradTargets::kAllParameters ? "all-parameters"
                                                      : "teammates-only";
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  trainer::TrainConfig& t = cfg.train;

  ObjectReader root(j, "");
  t.method = parse_method(root.get<std::string>("method", "br-diversity"));
  t.seed = root.get<std::uint64_t>("seed", 1);
  t.k = root.get<int>("k", 2);
  t.iterations = root.get<int>("iterations", 2000);
  t.learning_rate = root.get<double>("learning_rate", 0.05);
  t.optimizer =
      parse_optimizer(root.get<std::string>("optimizer", "adaptive-moments"));
  t.init_scale = root.get<double>("init_scale", 0.1);
  t.horizon = root.get<int>("horizon", 10);
  t.discount = root.get<double>("discount", 0.95);
  t.div_grad_targets = parse_targets(
      root.get<std::string>("div_grad_targets", "all-parameters"));
  t.jsd_weight = root.get<double>("jsd_weight", 1.0);
  t.log_every = root.get<int>("log_every", 50);
  t.checkpoint_every = root.get<int>("checkpoint_every", 0);
  cfg.kernels = root.get<std::string>("kernels", "auto");

  if (root.has("adam")) {
    ObjectReader adam(root.raw("adam"), "adam");
    t.adam.beta1 = adam.get<double>("beta1", 0.9);
    t.adam.beta2 = adam.get<double>("beta2", 0.999);
    t.adam.epsilon = adam.get<double>("epsilon", 1e-8);
    adam.finish();
  }

  if (root.has("kernel")) {
    ObjectReader kernel(root.raw("kernel"), "kernel");
    t.kernel.sigma = kernel.get<double>("sigma", 0.5);
    t.kernel.jitter = kernel.get<double>("jitter", 1e-6);
    t.median_heuristic = kernel.get<bool>("median_heuristic", false);
    kernel.finish();
  }

  if (root.has("env")) {
    ObjectReader env(root.raw("env"), "env");
    t.env.width = env.get<int>("width", 5);
    t.env.height = env.get<int>("height", 5);
    if (env.has("start")) {
      t.env.start = parse_cell(env.raw("start"), "env.start");
    }
    if (env.has("goals")) {
      const json& goals = env.raw("goals");
      if (!goals.is_array() || goals.empty()) {
        throw ConfigError("config key 'env.goals': expected a non-empty array");
      }
      t.env.goals.clear();
      for (const auto& g : goals) t.env.goals.push_back(parse_cell(g, "env.goals"));
    }
    env.finish();
  }

  root.finish();

  try {
    trainer::validate(t);
    sg::build_gridworld(t.env, t.horizon, t.discount);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("invalid config: ") + err.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json(path));
}

json run_config_to_json(const RunConfig& cfg) {
  const trainer::TrainConfig& t = cfg.train;
  json j;
  j["method"] = method_name(t.method);
  j["seed"] = t.seed;
  j["env"] = {{"width", t.env.width},
              {"height", t.env.height},
              {"start", cell_to_json(t.env.start)},
              {"goals", json::array()}};
  for (const auto& g : t.env.goals) j["env"]["goals"].push_back(cell_to_json(g));
  j["horizon"] = t.horizon;
  j["discount"] = t.discount;
  j["k"] = t.k;
  j["iterations"] = t.iterations;
  j["learning_rate"] = t.learning_rate;
  j["optimizer"] = optimizer_name(t.optimizer);
  j["adam"] = {{"beta1", t.adam.beta1},
               {"beta2", t.adam.beta2},
               {"epsilon", t.adam.epsilon}};
  j["init_scale"] = t.init_scale;
  j["kernel"] = {{"sigma", t.kernel.sigma},
                 {"jitter", t.kernel.jitter},
                 {"median_heuristic", t.median_heuristic}};
  j["div_grad_targets"] = div_grad_targets_name(t.div_grad_targets);
  j["jsd_weight"] = t.jsd_weight;
  j["log_every"] = t.log_every;
  j["checkpoint_every"] = t.checkpoint_every;
  j["kernels"] = cfg.kernels;
  return j;
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  json j;
  j["version"] = 1;
  j["env"] = {{"width", ckpt.env.width},
              {"height", ckpt.env.height},
              {"start", cell_to_json(ckpt.env.start)},
              {"goals", json::array()}};
  for (const auto& g : ckpt.env.goals) j["env"]["goals"].push_back(cell_to_json(g));
  j["horizon"] = ckpt.horizon;
  j["discount"] = ckpt.discount;
  j["population"] = json::array();
  for (int i = 0; i < ckpt.population.size(); ++i) {
    j["population"].push_back(
        {{"teammate_logits", logits_to_json(ckpt.population.teammates[i].logits)},
         {"br_logits",
          logits_to_json(ckpt.population.best_responses[i].logits)}});
  }
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint ckpt;
  ObjectReader root(j, "");
  const int version = root.require<int>("version");
  if (version != 1) {
    throw ConfigError("unsupported checkpoint version " +
                      std::to_string(version));
  }
  {
    ObjectReader env(root.raw("env"), "env");
    ckpt.env.width = env.require<int>("width");
    ckpt.env.height = env.require<int>("height");
    ckpt.env.start = parse_cell(env.raw("start"), "env.start");
    const json& goals = env.raw("goals");
    if (!goals.is_array() || goals.empty()) {
      throw ConfigError("checkpoint key 'env.goals': expected a non-empty array");
    }
    ckpt.env.goals.clear();
    for (const auto& g : goals) ckpt.env.goals.push_back(parse_cell(g, "env.goals"));
    env.finish();
  }
  ckpt.horizon = root.require<int>("horizon");
  ckpt.discount = root.require<double>("discount");
  const json& pop = root.raw("population");
  if (!pop.is_array() || pop.empty()) {
    throw ConfigError("checkpoint key 'population': expected a non-empty array");
  }
  for (const auto& entry : pop) {
    ObjectReader member(entry, "population[]");
    ckpt.population.teammates.emplace_back(
        logits_from_json(member.raw("teammate_logits"), "teammate_logits"));
    ckpt.population.best_responses.emplace_back(
        logits_from_json(member.raw("br_logits"), "br_logits"));
    member.finish();
  }
  root.finish();

  const auto& first = ckpt.population.teammates.front().logits;
  for (const auto& p : ckpt.population.teammates) {
    if (!p.logits.same_shape(first)) {
      throw ConfigError("checkpoint policies disagree on dimensions");
    }
  }
  for (const auto& p : ckpt.population.best_responses) {
    if (!p.logits.same_shape(first)) {
      throw ConfigError("checkpoint policies disagree on dimensions");
    }
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_json_atomic(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json(path));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string metrics_to_csv(const std::vector<trainer::MetricRecord>& records) {
  std::ostringstream out;
  out << "iteration,trace,det_or_jsd,objective,elapsed_seconds\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << format_double(r.trace) << ','
        << format_double(r.det_or_jsd) << ',' << format_double(r.objective)
        << ',' << format_double(r.elapsed_seconds) << '\n';
  }
  return out.str();
}

std::string cross_play_to_csv(const Mat& values) {
  std::ostringstream out;
  out << "br";
  for (int j = 0; j < values.cols; ++j) out << ",teammate_" << j;
  out << '\n';
  for (int i = 0; i < values.rows; ++i) {
    out << "br_" << i;
    for (int j = 0; j < values.cols; ++j) {
      out << ',' << format_double(values(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw IoError("short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                  "': " + ec.message());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw ConfigError("file '" + path.string() + "' is not valid JSON");
  }
  return j;
}

}  // namespace brd::io
