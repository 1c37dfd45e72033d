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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nntc/bcg.hpp"
#include "nntc/model.hpp"
#include "nntc/observations.hpp"
#include "nntc/rng.hpp"

namespace nntc {

/// A synthetic target tensor: a random convex combination of unit-scale
/// binary atoms, so its gauge norm is at most one and its nonnegative rank is
/// at most the atom count. The dense tensor is materialized when pi() fits
/// under the cap; entry() works either way.
struct GroundTruth {
  Shape shape;
  std::vector<Atom> atoms;     // all lambda = 1
  std::vector<double> weights; // simplex
  std::vector<double> dense;   // empty when pi() > cap

  double entry(std::span<const int> coords) const;
};

GroundTruth generate_ground_truth(const Shape& shape, int num_atoms, Rng& rng,
                                  std::int64_t dense_cap = kDefaultDenseCap);

/// n indices drawn i.i.d. uniformly with replacement; values are the exact
/// tensor entries plus, when noise_amplitude > 0, additive uniform noise on
/// [-a, a] clipped at zero.
ObservationSet sample_observations(const GroundTruth& truth, std::int64_t n, Rng& rng,
                                   double noise_amplitude = 0.0);

/// Normalized mean squared error over all pi() entries. The truth must have
/// its dense tensor materialized and nonzero.
double nmse(std::span<const double> dense_estimate, const GroundTruth& truth);
double nmse(const Model& estimate, const GroundTruth& truth);
/// Core ratio ||est - truth||_F^2 / ||truth||_F^2 for two dense tensors.
double nmse_dense(std::span<const double> dense_estimate, std::span<const double> dense_truth);

struct AlsConfig {
  int rank = 1;
  double l2 = 0.0;
  int max_iterations = 500;
  double tol = 1e-8;  // relative change of the sample loss
  std::uint64_t seed = 0;
  std::int64_t dense_cap = kDefaultDenseCap;
};

/// Alternating least squares baseline with ridge regularization and
/// nonnegativity by clipping. Factors start uniform on [0,1); modes are
/// updated cyclically with per-row ridge systems restricted to the observed
/// samples. Returns the dense CP reconstruction.
std::vector<double> als_complete(const ObservationSet& obs, const AlsConfig& config);

/// One sweep cell of the benchmark protocol.
struct BenchCell {
  Shape shape{{1, 1}};
  int num_atoms = 10;
  std::int64_t n = 500;
  std::vector<std::string> methods;  // subset of {"bcg", "als"}
  int reps = 1;
  double lambda = 1.0;
  double epsilon = 1e-6;
};

struct BenchResult {
  std::string method;
  Shape shape{{1, 1}};
  int num_atoms = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double nmse = 0.0;
  double time_s = 0.0;
  bool converged = false;
};

struct BenchOptions {
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  /// With record_time false every time_s field is written as zero, which
  /// makes whole result lists byte-for-byte reproducible.
  bool record_time = true;
  /// Dense NMSE evaluation ceiling; raise via large_scale for the big sweeps.
  bool large_scale = false;
  SolverConfig solver;
  AlsConfig als;
  std::vector<double> als_l2_grid = {1e-4, 1e-2, 1.0};
};

inline constexpr std::int64_t kBenchDefaultCap = 1'000'000;

/// Runs every (cell, rep, method) combination. The ground truth and samples
/// of a (cell, rep) pair are shared across methods and derived from
/// (master_seed, cell, rep), so parallel and serial execution produce the
/// same results in the same order. Per-run failures become rows with
/// converged=false instead of aborting the sweep.
std::vector<BenchResult> run_benchmark(const std::vector<BenchCell>& cells,
                                       const BenchOptions& options);

/// CSV with the exact header
/// method,shape,num_atoms,n,seed,nmse,time_s,converged
void write_csv(std::ostream& out, const std::vector<BenchResult>& results);

}  // namespace nntc
