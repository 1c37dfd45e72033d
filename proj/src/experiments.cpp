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

#include "nntc/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nntc/io.hpp"
#include "nntc/kernels.hpp"
#include "nntc/loss.hpp"

namespace nntc {

double GroundTruth::entry(std::span<const int> coords) const {
  if (!dense.empty()) {
    return dense[static_cast<std::size_t>(shape.linear_index(coords))];
  }
  double v = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].selects(coords)) v += weights[j];
  }
  return v;
}

GroundTruth generate_ground_truth(const Shape& shape, int num_atoms, Rng& rng,
                                  std::int64_t dense_cap) {
  if (num_atoms < 1) throw std::invalid_argument("need at least one generating atom");
  GroundTruth gt{shape, {}, {}, {}};
  gt.atoms.reserve(static_cast<std::size_t>(num_atoms));
  for (int j = 0; j < num_atoms; ++j) gt.atoms.push_back(random_vertex(shape, 1.0, rng));
  // uniform simplex weights via normalized exponentials
  gt.weights.resize(static_cast<std::size_t>(num_atoms));
  double sum = 0.0;
  for (double& w : gt.weights) {
    w = rng.exponential();
    sum += w;
  }
  for (double& w : gt.weights) w /= sum;
  if (shape.pi() <= dense_cap) {
    gt.dense.assign(static_cast<std::size_t>(shape.pi()), 0.0);
    for (std::size_t j = 0; j < gt.atoms.size(); ++j) {
      kernels::add_scaled_indicator(gt.dense, shape, gt.atoms[j], gt.weights[j]);
    }
  }
  return gt;
}

ObservationSet sample_observations(const GroundTruth& truth, std::int64_t n, Rng& rng,
                                   double noise_amplitude) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  const int p = truth.shape.order();
  std::vector<Index> indices;
  std::vector<double> values;
  indices.reserve(static_cast<std::size_t>(n));
  values.reserve(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    Index x;
    x.coords.resize(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
      x.coords[static_cast<std::size_t>(k)] =
          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(truth.shape.dim(k))));
    }
    double y = truth.entry(x.coords);
    if (noise_amplitude > 0.0) {
      y = std::max(0.0, y + noise_amplitude * (2.0 * rng.uniform() - 1.0));
    }
    indices.push_back(std::move(x));
    values.push_back(y);
  }
  return ObservationSet(truth.shape, indices, values);
}

double nmse_dense(std::span<const double> dense_estimate, std::span<const double> dense_truth) {
  const double denom = kernels::sum_sq(dense_truth);
  if (!(denom > 0.0)) throw std::invalid_argument("truth tensor is identically zero");
  return kernels::sum_sq_diff(dense_estimate, dense_truth) / denom;
}

double nmse(std::span<const double> dense_estimate, const GroundTruth& truth) {
  if (truth.dense.empty()) {
    throw std::invalid_argument("truth tensor is not materialized densely");
  }
  return nmse_dense(dense_estimate, truth.dense);
}

double nmse(const Model& estimate, const GroundTruth& truth) {
  if (truth.dense.empty()) {
    throw std::invalid_argument("truth tensor is not materialized densely");
  }
  const std::vector<double> dense = reconstruct_dense(estimate, truth.shape.pi());
  return nmse_dense(dense, truth.dense);
}

namespace {

double sample_loss(const ObservationSet& obs, const std::vector<std::vector<double>>& factors,
                   int rank) {
  const int p = obs.shape().order();
  double acc = 0.0;
  for (std::int64_t i = 0; i < obs.num_samples(); ++i) {
    auto coords = obs.sample_coords(i);
    double pred = 0.0;
    for (int q = 0; q < rank; ++q) {
      double prod = 1.0;
      for (int k = 0; k < p; ++k) {
        prod *= factors[static_cast<std::size_t>(k)]
                       [static_cast<std::size_t>(coords[k]) * static_cast<std::size_t>(rank) +
                        static_cast<std::size_t>(q)];
      }
      pred += prod;
    }
    const double r = obs.value(i) - pred;
    acc += r * r;
  }
  return acc / static_cast<double>(obs.num_samples());
}

}  // namespace

std::vector<double> als_complete(const ObservationSet& obs, const AlsConfig& config) {
  if (config.rank < 1) throw std::invalid_argument("ALS rank must be >= 1");
  if (config.l2 < 0.0) throw std::invalid_argument("ALS l2 must be nonnegative");
  const Shape& shape = obs.shape();
  if (shape.pi() > config.dense_cap) {
    throw std::length_error("dense materialization of " + std::to_string(shape.pi()) +
                            " entries exceeds the cap of " + std::to_string(config.dense_cap));
  }
  const int p = shape.order();
  const int k = config.rank;
  Rng rng(config.seed);

  std::vector<std::vector<double>> factors(static_cast<std::size_t>(p));
  for (int mode = 0; mode < p; ++mode) {
    auto& f = factors[static_cast<std::size_t>(mode)];
    f.resize(static_cast<std::size_t>(shape.dim(mode)) * static_cast<std::size_t>(k));
    for (double& x : f) x = rng.uniform();
  }

  // samples grouped by (mode, row)
  std::vector<std::vector<std::vector<std::int32_t>>> rows_of(static_cast<std::size_t>(p));
  for (int mode = 0; mode < p; ++mode) {
    rows_of[static_cast<std::size_t>(mode)].resize(static_cast<std::size_t>(shape.dim(mode)));
  }
  for (std::int64_t i = 0; i < obs.num_samples(); ++i) {
    auto coords = obs.sample_coords(i);
    for (int mode = 0; mode < p; ++mode) {
      rows_of[static_cast<std::size_t>(mode)][static_cast<std::size_t>(coords[mode])].push_back(
          static_cast<std::int32_t>(i));
    }
  }

  double prev = sample_loss(obs, factors, k);
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    for (int mode = 0; mode < p; ++mode) {
      auto& f = factors[static_cast<std::size_t>(mode)];
      const int rdim = shape.dim(mode);
#pragma omp parallel for schedule(dynamic)
      for (int a = 0; a < rdim; ++a) {
        Eigen::MatrixXd M = config.l2 * Eigen::MatrixXd::Identity(k, k);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
        Eigen::VectorXd v(k);
        for (std::int32_t s : rows_of[static_cast<std::size_t>(mode)][static_cast<std::size_t>(a)]) {
          auto coords = obs.sample_coords(s);
          for (int q = 0; q < k; ++q) {
            double prod = 1.0;
            for (int other = 0; other < p; ++other) {
              if (other == mode) continue;
              prod *= factors[static_cast<std::size_t>(other)]
                             [static_cast<std::size_t>(coords[other]) * static_cast<std::size_t>(k) +
                              static_cast<std::size_t>(q)];
            }
            v(q) = prod;
          }
          M.noalias() += v * v.transpose();
          rhs.noalias() += obs.value(s) * v;
        }
        Eigen::VectorXd w = M.ldlt().solve(rhs);
        if (!w.allFinite()) {
          // singular system: fall back to a small ridge
          const double ridge = std::max(config.l2, 1e-10 * (1.0 + M.trace()));
          w = (M + ridge * Eigen::MatrixXd::Identity(k, k)).ldlt().solve(rhs);
        }
        for (int q = 0; q < k; ++q) {
          f[static_cast<std::size_t>(a) * static_cast<std::size_t>(k) + static_cast<std::size_t>(q)] =
              std::max(0.0, w(q));
        }
      }
    }
    const double cur = sample_loss(obs, factors, k);
    if (std::abs(prev - cur) <= config.tol * std::max(prev, 1e-300)) {
      prev = cur;
      break;
    }
    prev = cur;
  }

  std::vector<double> dense(static_cast<std::size_t>(shape.pi()));
  kernels::cp_dense(shape, factors, k, dense);
  return dense;
}

namespace {

struct RunSlot {
  int cell = 0;
  int rep = 0;
  std::size_t row_base = 0;
};

BenchResult run_one_method(const BenchCell& cell, const std::string& method,
                           const GroundTruth& truth, const ObservationSet& obs,
                           std::uint64_t run_seed, const BenchOptions& options,
                           std::int64_t cap) {
  BenchResult row;
  row.method = method;
  row.shape = cell.shape;
  row.num_atoms = cell.num_atoms;
  row.n = cell.n;
  row.seed = run_seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (method == "bcg") {
      SolverConfig cfg = options.solver;
      cfg.epsilon = cell.epsilon;
      cfg.seed = run_seed;
      SolveResult res = solve(obs, cell.lambda, cfg);
      row.nmse = nmse(res.model, truth);
      row.converged = res.stats.converged;
    } else if (method == "als") {
      // best NMSE over the ridge grid, mirroring a tuned baseline
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t gi = 0; gi < options.als_l2_grid.size(); ++gi) {
        AlsConfig cfg = options.als;
        cfg.rank = cell.num_atoms;
        cfg.l2 = options.als_l2_grid[gi];
        cfg.seed = Rng::derive(run_seed, {gi});
        cfg.dense_cap = cap;
        const std::vector<double> dense = als_complete(obs, cfg);
        best = std::min(best, nmse(dense, truth));
      }
      row.nmse = best;
      row.converged = true;
    } else {
      throw std::invalid_argument("unknown method '" + method + "'");
    }
  } catch (const std::exception&) {
    row.nmse = std::numeric_limits<double>::infinity();
    row.converged = false;
  }
  row.time_s = options.record_time
                   ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                   : 0.0;
  return row;
}

}  // namespace

std::vector<BenchResult> run_benchmark(const std::vector<BenchCell>& cells,
                                       const BenchOptions& options) {
  if (options.parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  const std::int64_t cap = options.large_scale ? kDefaultDenseCap : kBenchDefaultCap;
  for (const BenchCell& cell : cells) {
    if (cell.shape.pi() > cap) {
      throw std::invalid_argument("cell shape " + cell.shape.to_string() +
                                  " exceeds the dense NMSE cap of " + std::to_string(cap) +
                                  (options.large_scale ? "" : " (use the large-scale flag)"));
    }
    if (cell.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (cell.n < 1) throw std::invalid_argument("n must be >= 1");
  }

  std::vector<RunSlot> slots;
  std::size_t rows = 0;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (int rep = 0; rep < cells[ci].reps; ++rep) {
      slots.push_back(RunSlot{static_cast<int>(ci), rep, rows});
      rows += cells[ci].methods.size();
    }
  }
  std::vector<BenchResult> results(rows);

  const auto nslots = static_cast<std::int64_t>(slots.size());
#pragma omp parallel for schedule(dynamic) num_threads(options.parallelism) if (options.parallelism > 1)
  for (std::int64_t si = 0; si < nslots; ++si) {
    const RunSlot& slot = slots[static_cast<std::size_t>(si)];
    const BenchCell& cell = cells[static_cast<std::size_t>(slot.cell)];
    const auto ci = static_cast<std::uint64_t>(slot.cell);
    const auto rep = static_cast<std::uint64_t>(slot.rep);
    Rng truth_rng(Rng::derive(options.master_seed, {ci, rep, 0}));
    const GroundTruth truth = generate_ground_truth(cell.shape, cell.num_atoms, truth_rng, cap);
    Rng sample_rng(Rng::derive(options.master_seed, {ci, rep, 1}));
    const ObservationSet obs = sample_observations(truth, cell.n, sample_rng);
    for (std::size_t mi = 0; mi < cell.methods.size(); ++mi) {
      const std::uint64_t run_seed = Rng::derive(options.master_seed, {ci, rep, 2 + mi});
      results[slot.row_base + mi] =
          run_one_method(cell, cell.methods[mi], truth, obs, run_seed, options, cap);
    }
  }
  return results;
}

void write_csv(std::ostream& out, const std::vector<BenchResult>& results) {
  out << "method,shape,num_atoms,n,seed,nmse,time_s,converged\n";
  for (const BenchResult& r : results) {
    out << r.method << ',' << r.shape.to_string() << ',' << r.num_atoms << ',' << r.n << ','
        << r.seed << ',' << format_double(r.nmse) << ',' << format_double(r.time_s) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

}  // namespace nntc
