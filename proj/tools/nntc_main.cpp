// Copyright 2026 The nntc Authors
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

// Command-line front end: data generation, solving, evaluation, benchmarking.
//
// Exit codes: 0 success/converged, 1 input error, 2 not converged,
// 3 resource exhausted.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nntc/bcg.hpp"
#include "nntc/experiments.hpp"
#include "nntc/io.hpp"
#include "nntc/loss.hpp"
#include "nntc/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitResourceExhausted = 3;

std::vector<int> parse_shape_list(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty dimension in shape '" + text + "'");
    dims.push_back(std::stoi(tok));
  }
  return dims;
}

std::uint64_t env_seed_override(std::uint64_t flag_value) {
  const char* env = std::getenv("NNTC_SEED");
  if (env == nullptr || *env == '\0') return flag_value;
  return std::strtoull(env, nullptr, 10);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int cmd_generate(const std::string& shape_text, int atoms, std::int64_t n, std::uint64_t seed,
                 const std::string& obs_out, const std::string& truth_out, double noise,
                 std::int64_t dense_cap) {
  const nntc::Shape shape(parse_shape_list(shape_text));
  seed = env_seed_override(seed);
  nntc::Rng truth_rng(nntc::Rng::derive(seed, {0}));
  const nntc::GroundTruth truth =
      nntc::generate_ground_truth(shape, atoms, truth_rng, dense_cap);
  nntc::Rng sample_rng(nntc::Rng::derive(seed, {1}));
  const nntc::ObservationSet obs = nntc::sample_observations(truth, n, sample_rng, noise);

  auto obs_stream = open_out(obs_out);
  nntc::write_observations(obs_stream, obs);

  if (!truth_out.empty()) {
    if (shape.pi() <= dense_cap) {
      auto truth_stream = open_out(truth_out);
      nntc::write_dense_as_observations(truth_stream, shape, truth.dense);
    } else {
      std::cerr << "warning: " << shape.pi() << " entries exceed the dense cap of " << dense_cap
                << "; skipping truth file\n";
    }
  }
  return kExitOk;
}

int cmd_solve(const std::string& in_path, double lambda, double epsilon, double accuracy,
              int restarts, std::uint64_t seed, std::int64_t max_iterations,
              std::int64_t node_budget, const std::string& model_out,
              const std::string& stats_out) {
  const nntc::ObservationSet obs = nntc::read_observations_file(in_path);
  nntc::SolverConfig config;
  config.epsilon = epsilon;
  config.oracle_accuracy = accuracy;
  config.am_restarts = restarts;
  config.seed = env_seed_override(seed);
  config.max_iterations = max_iterations;
  config.bb_node_budget = node_budget;
  const nntc::SolveResult result = nntc::solve(obs, lambda, config);

  auto model_stream = open_out(model_out);
  nntc::write_model(model_stream, result.model);

  if (!stats_out.empty()) {
    nlohmann::ordered_json j;
    j["iterations"] = result.stats.iterations;
    j["oracle_calls"] = result.stats.oracle_calls;
    j["am_successes"] = result.stats.am_successes;
    j["early_stops"] = result.stats.early_stops;
    j["phi_halvings"] = result.stats.phi_halvings;
    j["descent_steps"] = result.stats.descent_steps;
    j["fw_steps"] = result.stats.fw_steps;
    j["bb_nodes"] = result.stats.bb_nodes;
    j["final_phi"] = result.stats.final_phi;
    j["final_loss"] = result.stats.final_loss;
    j["converged"] = result.stats.converged;
    j["wall_time_s"] = result.stats.wall_time_s;
    j["lambda"] = lambda;
    j["epsilon"] = epsilon;
    auto stats_stream = open_out(stats_out);
    stats_stream << j.dump(2) << '\n';
  }
  return result.stats.converged ? kExitOk : kExitNotConverged;
}

int cmd_eval(const std::string& model_path, const std::string& truth_path) {
  const nntc::Model model = nntc::read_model_file(model_path);
  std::ifstream truth_stream(truth_path);
  if (!truth_stream) throw std::runtime_error("cannot open " + truth_path);
  nntc::Shape truth_shape({1, 1});
  const std::vector<double> truth = nntc::read_dense_observations(truth_stream, &truth_shape);
  if (!(truth_shape == model.shape())) {
    std::cerr << "error: model shape " << model.shape().to_string() << " does not match truth shape "
              << truth_shape.to_string() << '\n';
    return kExitInputError;
  }
  const std::vector<double> dense = nntc::reconstruct_dense(model, model.shape().pi());
  const double value = nntc::nmse_dense(dense, truth);
  std::printf("%.6e\n", value);
  return kExitOk;
}

std::vector<nntc::BenchCell> parse_bench_spec(std::istream& in) {
  std::vector<nntc::BenchCell> cells;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::pair<std::string, std::string>> kvs;
    while (ss >> tok) {
      if (tok[0] == '#') break;
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw nntc::ParseError(lineno, "expected key=value, got '" + tok + "'");
      }
      kvs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    if (kvs.empty()) continue;
    std::optional<nntc::Shape> shape;
    nntc::BenchCell cell;
    for (const auto& [key, value] : kvs) {
      if (key == "shape") {
        shape = nntc::Shape(parse_shape_list(value));
      } else if (key == "atoms") {
        cell.num_atoms = std::stoi(value);
      } else if (key == "n") {
        cell.n = std::stoll(value);
      } else if (key == "methods") {
        std::stringstream ms(value);
        std::string m;
        while (std::getline(ms, m, ',')) cell.methods.push_back(m);
      } else if (key == "reps") {
        cell.reps = std::stoi(value);
      } else if (key == "lambda") {
        cell.lambda = std::stod(value);
      } else if (key == "epsilon") {
        cell.epsilon = std::stod(value);
      } else {
        throw nntc::ParseError(lineno, "unknown key '" + key + "'");
      }
    }
    if (!shape) throw nntc::ParseError(lineno, "cell needs shape=");
    if (cell.methods.empty()) throw nntc::ParseError(lineno, "cell needs methods=");
    cell.shape = *shape;
    cells.push_back(std::move(cell));
  }
  return cells;
}

int cmd_bench(const std::string& spec_path, const std::string& out_path, std::uint64_t master_seed,
              int parallelism, bool no_times, bool large_scale) {
  std::ifstream spec_stream(spec_path);
  if (!spec_stream) throw std::runtime_error("cannot open " + spec_path);
  const std::vector<nntc::BenchCell> cells = parse_bench_spec(spec_stream);

  nntc::BenchOptions options;
  options.master_seed = env_seed_override(master_seed);
  options.parallelism = parallelism;
  options.record_time = !no_times;
  options.large_scale = large_scale;
  const std::vector<nntc::BenchResult> results = nntc::run_benchmark(cells, options);

  auto out = open_out(out_path);
  nntc::write_csv(out, results);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative tensor completion via blended conditional gradients"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic instance");
  std::string gen_shape;
  int gen_atoms = 10;
  std::int64_t gen_n = 500;
  std::uint64_t gen_seed = 0;
  std::string gen_obs_out;
  std::string gen_truth_out;
  double gen_noise = 0.0;
  std::int64_t gen_cap = nntc::kDefaultDenseCap;
  gen->add_option("--shape", gen_shape, "Comma-separated dimensions, e.g. 10,10,10")->required();
  gen->add_option("--atoms", gen_atoms, "Number of generating atoms");
  gen->add_option("--n", gen_n, "Number of samples (with replacement)");
  gen->add_option("--seed", gen_seed, "Random seed (NNTC_SEED overrides)");
  gen->add_option("--obs-out", gen_obs_out, "Observation file path")->required();
  gen->add_option("--truth-out", gen_truth_out, "Dense truth file path");
  gen->add_option("--noise", gen_noise, "Additive uniform noise amplitude (default 0)");
  gen->add_option("--dense-cap", gen_cap, "Dense materialization cap in entries");

  // solve
  auto* sol = app.add_subcommand("solve", "Solve a completion instance");
  std::string sol_in;
  double sol_lambda = 1.0;
  double sol_epsilon = 1e-6;
  double sol_accuracy = 2.0;
  int sol_restarts = 10;
  std::uint64_t sol_seed = 0;
  std::int64_t sol_max_iter = 100000;
  std::int64_t sol_budget = nntc::kDefaultNodeBudget;
  std::string sol_model_out;
  std::string sol_stats_out;
  sol->add_option("--in", sol_in, "Observation file")->required();
  sol->add_option("--lambda", sol_lambda, "Gauge ball radius")->required();
  sol->add_option("--epsilon", sol_epsilon, "Target gap tolerance");
  sol->add_option("--K", sol_accuracy, "Oracle accuracy (>= 1)");
  sol->add_option("--restarts", sol_restarts, "Alternating-maximization restarts");
  sol->add_option("--seed", sol_seed, "Random seed (NNTC_SEED overrides)");
  sol->add_option("--max-iterations", sol_max_iter, "Iteration cap");
  sol->add_option("--node-budget", sol_budget, "Branch-and-bound node budget");
  sol->add_option("--model-out", sol_model_out, "Model file path")->required();
  sol->add_option("--stats-out", sol_stats_out, "Stats JSON path");

  // eval
  auto* ev = app.add_subcommand("eval", "Print the NMSE of a model against a dense truth file");
  std::string ev_model;
  std::string ev_truth;
  ev->add_option("--model", ev_model, "Model file")->required();
  ev->add_option("--truth", ev_truth, "Dense truth file")->required();

  // bench
  auto* ben = app.add_subcommand("bench", "Run a benchmark sweep");
  std::string ben_spec;
  std::string ben_out;
  std::uint64_t ben_seed = 0;
  int ben_par = 1;
  bool ben_no_times = false;
  bool ben_large = false;
  ben->add_option("--spec", ben_spec, "Sweep spec file (one key=value cell per line)")->required();
  ben->add_option("--out", ben_out, "Output CSV path")->required();
  ben->add_option("--master-seed", ben_seed, "Master seed (NNTC_SEED overrides)");
  ben->add_option("--parallelism", ben_par, "Cells run in parallel");
  ben->add_flag("--no-times", ben_no_times, "Write zero times for reproducible output");
  ben->add_flag("--large-scale", ben_large, "Raise the dense NMSE cap for the big sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_shape, gen_atoms, gen_n, gen_seed, gen_obs_out, gen_truth_out,
                          gen_noise, gen_cap);
    }
    if (sol->parsed()) {
      return cmd_solve(sol_in, sol_lambda, sol_epsilon, sol_accuracy, sol_restarts, sol_seed,
                       sol_max_iter, sol_budget, sol_model_out, sol_stats_out);
    }
    if (ev->parsed()) {
      return cmd_eval(ev_model, ev_truth);
    }
    if (ben->parsed()) {
      return cmd_bench(ben_spec, ben_out, ben_seed, ben_par, ben_no_times, ben_large);
    }
  } catch (const nntc::ResourceExhaustedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResourceExhausted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
