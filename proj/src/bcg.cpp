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

#include "nntc/bcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nntc/kernels.hpp"
#include "nntc/loss.hpp"

namespace nntc {

ActiveSet::ActiveSet(const ObservationSet& obs, double lambda) : obs_(&obs), lambda_(lambda) {
  Atom zero;
  zero.lambda = lambda;
  zero.theta = zero_theta(obs.shape());
  atoms_.push_back(zero);
  columns_.push_back(std::vector<double>(static_cast<std::size_t>(obs.num_unique()), 0.0));
  weights_.push_back(1.0);
  psi_.assign(static_cast<std::size_t>(obs.num_unique()), 0.0);
}

void ActiveSet::normalize_and_recompute() {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  if (!(sum > 0.0)) throw std::logic_error("active set weights degenerated to zero");
  for (double& w : weights_) w /= sum;
  std::fill(psi_.begin(), psi_.end(), 0.0);
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    const double w = weights_[j];
    const auto& col = columns_[j];
    for (std::size_t i = 0; i < psi_.size(); ++i) psi_[i] += w * col[i];
  }
}

void ActiveSet::fw_step(const Atom& atom, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("step must lie in [0, 1]");
  std::size_t slot = atoms_.size();
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (atoms_[j] == atom) {
      slot = j;
      break;
    }
  }
  if (slot == atoms_.size()) {
    atoms_.push_back(atom);
    columns_.push_back(atom_project(atom, *obs_));
    weights_.push_back(0.0);
  }
  for (double& w : weights_) w *= (1.0 - t);
  weights_[slot] += t;
  normalize_and_recompute();
}

void ActiveSet::set_weights(std::vector<double> w) {
  if (w.size() != weights_.size()) throw std::invalid_argument("weight count mismatch");
  for (double& x : w) {
    if (x < 0.0) {
      if (x < -1e-9) throw std::invalid_argument("weights must be nonnegative");
      x = 0.0;
    }
  }
  weights_ = std::move(w);
  normalize_and_recompute();
}

void ActiveSet::prune(double tol) {
  std::size_t kept = 0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (weights_[j] >= tol) {
      if (kept != j) {
        atoms_[kept] = std::move(atoms_[j]);
        columns_[kept] = std::move(columns_[j]);
        weights_[kept] = weights_[j];
      }
      ++kept;
    }
  }
  if (kept == 0) return;  // nothing above tol: keep the set as-is
  atoms_.resize(kept);
  columns_.resize(kept);
  weights_.resize(kept);
  normalize_and_recompute();
}

double active_gap(const ActiveSet& active, std::span<const double> c) {
  if (active.size() == 0) throw std::invalid_argument("active set is empty");
  const double at_psi = kernels::dot(c, active.psi_u());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < active.size(); ++j) {
    best = std::max(best, at_psi - kernels::dot(c, active.column(j)));
  }
  return best;
}

double line_search_quadratic(std::span<const double> psi_u, std::span<const double> direction,
                             const ObservationSet& obs) {
  const auto u = static_cast<std::size_t>(obs.num_unique());
  if (psi_u.size() != u || direction.size() != u) {
    throw std::invalid_argument("vectors must have length u");
  }
  const double n = static_cast<double>(obs.num_samples());
  auto counts = obs.counts();
  auto sums = obs.value_sums();
  double slope = 0.0;
  double curv = 0.0;
  for (std::size_t j = 0; j < u; ++j) {
    const double cj = (2.0 / n) * (static_cast<double>(counts[j]) * psi_u[j] - sums[j]);
    slope += cj * direction[j];
    curv += (2.0 / n) * static_cast<double>(counts[j]) * direction[j] * direction[j];
  }
  if (!(curv > 0.0)) return 0.0;
  return std::clamp(-slope / curv, 0.0, 1.0);
}

namespace {

/// One descent step over the active hull: project the negative weight-space
/// gradient onto the simplex tangent cone at the current weights, then take
/// the exact quadratic line-search step along it, capped at the first weight
/// to hit zero. Returns false when no strict decrease is possible.
bool simplex_descent_step(ActiveSet& active, std::span<const double> c, const ObservationSet& obs,
                          double prune_tol) {
  const std::size_t m = active.size();
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) g[j] = kernels::dot(c, active.column(j));
  const std::vector<double>& w = active.weights();

  std::vector<char> allowed(m, 1);
  std::vector<double> d(m, 0.0);
  while (true) {
    double gsum = 0.0;
    std::size_t na = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (allowed[j]) {
        gsum += g[j];
        ++na;
      }
    }
    if (na == 0) return false;
    const double nu = gsum / static_cast<double>(na);
    bool removed = false;
    for (std::size_t j = 0; j < m; ++j) {
      d[j] = allowed[j] ? nu - g[j] : 0.0;
      if (allowed[j] && w[j] <= 0.0 && d[j] < 0.0) {
        allowed[j] = 0;
        removed = true;
      }
    }
    if (!removed) break;
  }

  double slope = 0.0;
  for (std::size_t j = 0; j < m; ++j) slope += g[j] * d[j];
  if (!(slope < 0.0)) return false;

  double t_max = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    if (d[j] < 0.0) t_max = std::min(t_max, w[j] / -d[j]);
  }
  if (!std::isfinite(t_max)) return false;  // d >= 0 with sum 0 means d == 0

  // curvature of the loss along the weight direction
  const double n = static_cast<double>(obs.num_samples());
  auto counts = obs.counts();
  const auto u = static_cast<std::size_t>(obs.num_unique());
  std::vector<double> dpsi(u, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (d[j] == 0.0) continue;
    const auto col = active.column(j);
    for (std::size_t i = 0; i < u; ++i) dpsi[i] += d[j] * col[i];
  }
  double curv = 0.0;
  for (std::size_t i = 0; i < u; ++i) {
    curv += (2.0 / n) * static_cast<double>(counts[i]) * dpsi[i] * dpsi[i];
  }
  const double t = curv > 0.0 ? std::min(t_max, -slope / curv) : t_max;
  if (!(t > 0.0)) return false;

  std::vector<double> next(w);
  for (std::size_t j = 0; j < m; ++j) next[j] += t * d[j];
  active.set_weights(std::move(next));
  active.prune(prune_tol);
  return true;
}

}  // namespace

SolveResult solve(const ObservationSet& obs, double lambda, const SolverConfig& config,
                  const SolveObserver& observer) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(config.oracle_accuracy >= 1.0)) throw std::invalid_argument("K must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  ActiveSet active(obs, lambda);
  LossState state(obs);
  SolveStats stats;
  Rng rng(config.seed);
  const OracleConfig oracle_config{config.am_restarts, config.perturb_prob,
                                   config.bb_node_budget};
  ThetaVectors incumbent = zero_theta(obs.shape());

  stats.loss_history.push_back(loss(state));

  bool converged = false;
  double phi = config.phi_init;
  if (!(phi > 0.0)) {
    // Auto gap estimate: exact separation at the zero atom, halved.
    SeparationRequest req{&obs, gradient(state), state.psi_u, lambda, config.oracle_accuracy, 1.0};
    ExactSeparationResult r0 = exact_separation(req, std::nullopt, config.bb_node_budget);
    stats.oracle_calls++;
    stats.bb_nodes += r0.nodes;
    if (r0.objective <= config.epsilon) {
      converged = true;
      phi = std::max(r0.objective, 0.0);
    } else {
      phi = r0.objective / 2.0;
      incumbent = std::move(r0.theta);
    }
  }

  while (!converged && stats.iterations < config.max_iterations) {
    stats.iterations++;
    std::vector<double> c = gradient(state);
    bool stepped = false;
    if (active_gap(active, c) >= phi / config.oracle_accuracy) {
      stepped = simplex_descent_step(active, c, obs, config.weight_prune_tol);
      if (stepped) stats.descent_steps++;
    }
    if (!stepped) {
      SeparationRequest req{&obs, std::move(c), active.psi_u(), lambda, config.oracle_accuracy,
                            phi};
      SeparationResult res = weak_separation(req, oracle_config, rng, incumbent);
      stats.oracle_calls++;
      stats.bb_nodes += res.bb_nodes;
      if (res.am_succeeded) stats.am_successes++;
      if (res.early_stopped) stats.early_stops++;
      if (res.separated) {
        incumbent = res.vertex.theta;
        const std::vector<double> col = atom_project(res.vertex, obs);
        std::vector<double> dir(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) dir[i] = col[i] - active.psi_u()[i];
        const double t = line_search_quadratic(active.psi_u(), dir, obs);
        active.fw_step(res.vertex, t);
        active.prune(config.weight_prune_tol);
        stats.fw_steps++;
      } else if (res.dual_bound <= config.epsilon) {
        // The completed exact solve certifies the true gap at this iterate.
        converged = true;
        phi = std::max(res.dual_bound, 0.0);
      } else {
        phi /= 2.0;
        stats.phi_halvings++;
      }
    }
    state.psi_u = active.psi_u();
    stats.loss_history.push_back(loss(state));
    if (observer) observer(IterationRecord{stats.iterations, stats.loss_history.back(), phi, &active});
  }

  stats.converged = converged;
  stats.final_phi = phi;
  stats.final_loss = stats.loss_history.back();
  stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Model model(obs.shape(), lambda, active.atoms(), active.weights());
  return SolveResult{std::move(model), std::move(stats)};
}

}  // namespace nntc
