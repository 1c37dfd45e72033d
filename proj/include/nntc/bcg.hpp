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
#include <functional>
#include <span>
#include <vector>

#include "nntc/model.hpp"
#include "nntc/observations.hpp"
#include "nntc/oracle.hpp"

namespace nntc {

/// The solver's working set: atoms, their cached projections onto U, and the
/// simplex weights. The current iterate psi_u is always the weighted sum of
/// the cached columns; every mutation renormalizes the weights and recomputes
/// psi_u from scratch so the three stay consistent to machine precision.
class ActiveSet {
 public:
  /// Starts with the zero atom at weight one.
  ActiveSet(const ObservationSet& obs, double lambda);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> column(std::size_t j) const { return columns_[j]; }
  const std::vector<double>& psi_u() const { return psi_; }

  /// Frank-Wolfe step of size t toward the atom: all weights scale by (1-t)
  /// and the atom's weight gains t. Adds the atom when absent.
  void fw_step(const Atom& atom, double t);

  /// Replace the weights (same length; negative dust is clamped to zero).
  void set_weights(std::vector<double> w);

  /// Drop atoms whose weight falls below tol. Keeps at least one atom.
  void prune(double tol);

 private:
  void normalize_and_recompute();

  const ObservationSet* obs_;
  double lambda_;
  std::vector<Atom> atoms_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> weights_;
  std::vector<double> psi_;
};

/// Restricted Frank-Wolfe gap over the active atoms: max_j <c, psi_u - column_j>.
double active_gap(const ActiveSet& active, std::span<const double> c);

/// Exact minimizer of the quadratic loss along psi_u + t * direction over
/// t in [0, 1]. Returns 0 when the direction has no curvature on the
/// observed entries.
double line_search_quadratic(std::span<const double> psi_u, std::span<const double> direction,
                             const ObservationSet& obs);

struct SolverConfig {
  double epsilon = 1e-6;          // target gap tolerance
  double oracle_accuracy = 2.0;   // K
  double phi_init = 0.0;          // <= 0 means auto
  std::int64_t max_iterations = 100'000;
  int am_restarts = 10;
  double perturb_prob = 0.5;
  std::int64_t bb_node_budget = kDefaultNodeBudget;
  double weight_prune_tol = 1e-12;
  std::uint64_t seed = 0;
};

struct SolveStats {
  std::int64_t iterations = 0;
  std::int64_t oracle_calls = 0;
  std::int64_t am_successes = 0;
  std::int64_t early_stops = 0;
  std::int64_t phi_halvings = 0;
  std::int64_t descent_steps = 0;
  std::int64_t fw_steps = 0;
  std::int64_t bb_nodes = 0;
  double final_phi = 0.0;
  double final_loss = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
  std::vector<double> loss_history;  // one value per completed iteration, plus the start
};

/// Per-iteration view handed to the test observer.
struct IterationRecord {
  std::int64_t iteration;
  double loss_value;
  double phi;
  const ActiveSet* active;
};
using SolveObserver = std::function<void(const IterationRecord&)>;

struct SolveResult {
  Model model;
  SolveStats stats;
};

/// Blended conditional gradients over the gauge ball projected onto U.
///
/// Each iteration either takes a descent step over the convex hull of the
/// active atoms (when the restricted gap is at least Phi/K) or consults the
/// weak separation oracle: a returned vertex triggers a Frank-Wolfe step with
/// exact line search and joins the active set, while FALSE halves Phi. The
/// run converges once a completed exact separation certifies that the true
/// gap is at most epsilon. Phi starts at half the exact gap at the zero atom
/// unless config.phi_init overrides it. Deterministic given config.seed.
SolveResult solve(const ObservationSet& obs, double lambda, const SolverConfig& config,
                  const SolveObserver& observer = nullptr);

}  // namespace nntc
