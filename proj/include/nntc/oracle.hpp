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
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nntc/atom.hpp"
#include "nntc/observations.hpp"
#include "nntc/rng.hpp"

namespace nntc {

/// One linear separation problem over the projected vertex set: maximize
/// <c, psi - phi> over scaled binary rank-1 tensors phi, with everything
/// restricted to the unique observed index set U. K and Phi carry the weak
/// oracle's accuracy and gap estimate.
struct SeparationRequest {
  const ObservationSet* obs = nullptr;
  std::vector<double> c;      // linear objective over U
  std::vector<double> psi_u;  // current point over U
  double lambda = 0.0;
  double accuracy = 2.0;      // K >= 1
  double gap_estimate = 1.0;  // Phi > 0

  void validate() const;
};

/// Objective value of an indicator assignment: sum_j c_j * (psi_j - lambda *
/// prod_k theta[k][U_j_k]), summed in U order. Every oracle in this module
/// scores candidates with this exact summation, which is what makes the
/// exact and brute-force results comparable without tolerances.
double separation_objective(const ThetaVectors& theta, const SeparationRequest& req);

/// One full sweep of single-bit flips in (mode, index) order, keeping a flip
/// only when it strictly increases the objective. Never returns a theta worse
/// than the input. When `accepted_objectives` is given it receives the
/// objective value after each accepted flip (the monotonicity witness).
ThetaVectors alternating_maximization(const SeparationRequest& req, const ThetaVectors& theta_init,
                                      std::vector<double>* accepted_objectives = nullptr);

/// Best of `restarts` alternating-maximization runs: one from the incumbent
/// as-is and restarts-1 from copies with each bit independently complemented
/// with probability perturb_prob. Deterministic given the rng state; ties go
/// to the earliest start.
ThetaVectors multi_start_am(const SeparationRequest& req, int restarts, double perturb_prob,
                            Rng& rng, const ThetaVectors& incumbent);

struct ExactSeparationResult {
  ThetaVectors theta;
  double objective = 0.0;   // separation_objective(theta)
  double dual_bound = 0.0;  // == objective when the search ran to completion
  bool early_stopped = false;
  std::int64_t nodes = 0;
};

/// Raised when the branch-and-bound node budget runs out before the search
/// can meet its contract. Carries the best incumbent seen and a valid bound.
class ResourceExhaustedError : public std::runtime_error {
 public:
  ResourceExhaustedError(std::string what, ExactSeparationResult best)
      : std::runtime_error(std::move(what)), best_(std::move(best)) {}
  const ExactSeparationResult& best() const { return best_; }

 private:
  ExactSeparationResult best_;
};

/// Test hook: observes every explored node after propagation. `fixed` holds
/// one entry per indicator bit: 0 fixed to zero, 1 fixed to one, 2 free.
using NodeInspector = std::function<void(std::span<const std::int8_t> fixed, double upper_bound)>;

inline constexpr std::int64_t kDefaultNodeBudget = 10'000'000;

/// Exact maximization of <c, psi - phi> over the projected vertex set by
/// depth-first branch-and-bound on the rho indicator bits.
///
/// The node upper bound is <c, psi_u> - lambda * sum of c_j over attainable
/// entries with c_j < 0, where an entry is attainable while none of its bits
/// is fixed to zero. Branching picks the free bit whose fixing to zero
/// removes the largest absolute amount from that sum, ties broken by
/// (mode, index) order; the one-branch is explored first.
///
/// With `early_stop_target` set, the search returns as soon as an incumbent's
/// objective strictly exceeds the target, and subtrees whose bound is at or
/// below the target are cut without being resolved; a completed run then
/// certifies dual_bound <= target without necessarily locating the exact
/// optimum. Without a target the search is exhaustive: the returned objective
/// equals the true optimum and dual_bound equals it. `warm_incumbent` seeds
/// the incumbent (pruning only; the result is the same modulo which optimal
/// theta is reported). Exceeding `node_budget` throws ResourceExhaustedError.
ExactSeparationResult exact_separation(const SeparationRequest& req,
                                       std::optional<double> early_stop_target = std::nullopt,
                                       std::int64_t node_budget = kDefaultNodeBudget,
                                       const ThetaVectors* warm_incumbent = nullptr,
                                       const NodeInspector* inspector = nullptr);

struct OracleConfig {
  int am_restarts = 10;
  double perturb_prob = 0.5;
  std::int64_t node_budget = kDefaultNodeBudget;
};

/// Outcome of one weak separation call. Either a vertex whose recomputed gap
/// meets the Phi/K threshold, or FALSE with a dual bound certifying that no
/// vertex improves by more than Phi.
struct SeparationResult {
  bool separated = false;
  Atom vertex;       // valid when separated
  double gap = 0.0;  // separation_objective of the vertex
  double dual_bound = 0.0;  // valid when !separated; <= Phi
  // instrumentation
  bool am_succeeded = false;
  bool used_exact = false;
  bool early_stopped = false;
  std::int64_t bb_nodes = 0;
};

/// Weak separation: try multi-start alternating maximization first; if its
/// best gap reaches Phi/K return that vertex without touching the exact
/// search. Otherwise run exact_separation with early stop at Phi/K, seeded
/// with the heuristic's theta. A completed exact run whose optimum stays at
/// or below Phi/K yields FALSE with dual_bound equal to that optimum.
SeparationResult weak_separation(const SeparationRequest& req, const OracleConfig& config,
                                 Rng& rng, const ThetaVectors& incumbent);

struct BruteForceResult {
  ThetaVectors theta;
  double objective = 0.0;
};

/// Enumeration over all 2^rho indicator assignments. Test oracle; refuses
/// rho > 24.
BruteForceResult brute_force_separation(const SeparationRequest& req);

}  // namespace nntc
