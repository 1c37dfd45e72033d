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

#include "nntc/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nntc {

void SeparationRequest::validate() const {
  if (obs == nullptr) throw std::invalid_argument("separation request has no observations");
  const auto u = static_cast<std::size_t>(obs->num_unique());
  if (c.size() != u || psi_u.size() != u) {
    throw std::invalid_argument("separation request vectors must have length u");
  }
  if (!(accuracy >= 1.0)) throw std::invalid_argument("oracle accuracy K must be >= 1");
  if (!(gap_estimate > 0.0)) throw std::invalid_argument("gap estimate Phi must be positive");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  for (std::size_t j = 0; j < u; ++j) {
    if (!std::isfinite(c[j]) || !std::isfinite(psi_u[j])) {
      throw std::invalid_argument("separation request coefficients must be finite");
    }
  }
}

namespace {

void check_theta_shape(const ThetaVectors& theta, const Shape& shape) {
  if (static_cast<int>(theta.size()) != shape.order()) {
    throw std::invalid_argument("theta mode count does not match shape");
  }
  for (int k = 0; k < shape.order(); ++k) {
    if (theta[static_cast<std::size_t>(k)].size() != shape.dim(k)) {
      throw std::invalid_argument("theta length does not match mode dimension");
    }
  }
}

}  // namespace

double separation_objective(const ThetaVectors& theta, const SeparationRequest& req) {
  const ObservationSet& obs = *req.obs;
  check_theta_shape(theta, obs.shape());
  const std::int64_t u = obs.num_unique();
  const int p = obs.shape().order();
  double z = 0.0;
  for (std::int64_t j = 0; j < u; ++j) {
    auto coords = obs.unique_coords(j);
    double prod = 1.0;
    for (int k = 0; k < p; ++k) {
      if (!theta[static_cast<std::size_t>(k)].get(coords[k])) {
        prod = 0.0;
        break;
      }
    }
    z += req.c[static_cast<std::size_t>(j)] *
         (req.psi_u[static_cast<std::size_t>(j)] - req.lambda * prod);
  }
  return z;
}

ThetaVectors alternating_maximization(const SeparationRequest& req, const ThetaVectors& theta_init,
                                      std::vector<double>* accepted_objectives) {
  req.validate();
  const ObservationSet& obs = *req.obs;
  check_theta_shape(theta_init, obs.shape());
  const int p = obs.shape().order();
  const std::int64_t u = obs.num_unique();

  ThetaVectors theta = theta_init;
  // zeros[j]: number of modes whose indicator bit at U[j] is currently 0.
  std::vector<std::int32_t> zeros(static_cast<std::size_t>(u), 0);
  for (std::int64_t j = 0; j < u; ++j) {
    auto coords = obs.unique_coords(j);
    for (int k = 0; k < p; ++k) {
      if (!theta[static_cast<std::size_t>(k)].get(coords[k])) zeros[static_cast<std::size_t>(j)]++;
    }
  }

  const double z_init = separation_objective(theta, req);
  double z = z_init;
  for (int mode = 0; mode < p; ++mode) {
    for (int k = 0; k < obs.shape().dim(mode); ++k) {
      const bool bit = theta[static_cast<std::size_t>(mode)].get(k);
      const auto touched = obs.entries_at(mode, k);
      double delta = 0.0;
      if (bit) {
        // 1 -> 0 uncovers entries that are currently fully selected
        for (std::int32_t j : touched) {
          if (zeros[static_cast<std::size_t>(j)] == 0)
            delta += req.lambda * req.c[static_cast<std::size_t>(j)];
        }
      } else {
        // 0 -> 1 covers entries that were one indicator short
        for (std::int32_t j : touched) {
          if (zeros[static_cast<std::size_t>(j)] == 1)
            delta -= req.lambda * req.c[static_cast<std::size_t>(j)];
        }
      }
      if (delta > 0.0) {
        theta[static_cast<std::size_t>(mode)].flip(k);
        const std::int32_t step = bit ? 1 : -1;
        for (std::int32_t j : touched) zeros[static_cast<std::size_t>(j)] += step;
        z += delta;
        if (accepted_objectives) accepted_objectives->push_back(z);
      }
    }
  }

  // Rounding in the incremental deltas cannot be allowed to hand back a theta
  // that scores below the start under the canonical objective.
  if (separation_objective(theta, req) < z_init) return theta_init;
  return theta;
}

ThetaVectors multi_start_am(const SeparationRequest& req, int restarts, double perturb_prob,
                            Rng& rng, const ThetaVectors& incumbent) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  req.validate();
  const ObservationSet& obs = *req.obs;
  check_theta_shape(incumbent, obs.shape());
  const int p = obs.shape().order();

  ThetaVectors best = alternating_maximization(req, incumbent);
  double best_z = separation_objective(best, req);
  for (int r = 1; r < restarts; ++r) {
    ThetaVectors start = incumbent;
    for (int mode = 0; mode < p; ++mode) {
      for (int k = 0; k < obs.shape().dim(mode); ++k) {
        if (rng.bernoulli(perturb_prob)) start[static_cast<std::size_t>(mode)].flip(k);
      }
    }
    ThetaVectors candidate = alternating_maximization(req, start);
    const double z = separation_objective(candidate, req);
    if (z > best_z) {
      best = std::move(candidate);
      best_z = z;
    }
  }
  return best;
}

namespace {

constexpr std::int8_t kZero = 0;
constexpr std::int8_t kOne = 1;
constexpr std::int8_t kFree = 2;

/// Depth-first branch-and-bound over the rho indicator bits. Entry j is
/// "alive" while none of its bits is fixed to zero; the running bound tracks
/// the total attainable negative objective mass. Before branching, bits whose
/// alive entries all share one sign are fixed by dominance: a bit touching no
/// alive negative entry can only hurt when set, and a bit touching only
/// negative entries can only help.
class BnbSearch {
 public:
  BnbSearch(const SeparationRequest& req, std::optional<double> target, std::int64_t budget,
            const ThetaVectors* warm, const NodeInspector* inspector)
      : req_(req),
        obs_(*req.obs),
        shape_(obs_.shape()),
        p_(shape_.order()),
        rho_(shape_.rho()),
        target_(target),
        budget_(budget),
        inspector_(inspector) {
    bit_mode_.resize(static_cast<std::size_t>(rho_));
    bit_coord_.resize(static_cast<std::size_t>(rho_));
    for (int mode = 0, b = 0; mode < p_; ++mode) {
      for (int k = 0; k < shape_.dim(mode); ++k, ++b) {
        bit_mode_[static_cast<std::size_t>(b)] = mode;
        bit_coord_[static_cast<std::size_t>(b)] = k;
      }
    }
    state_.assign(static_cast<std::size_t>(rho_), kFree);
    const std::int64_t u = obs_.num_unique();
    zero_cnt_.assign(static_cast<std::size_t>(u), 0);
    free_cnt_.assign(static_cast<std::size_t>(u), static_cast<std::int32_t>(p_));

    double sum_abs_c = 0.0;
    for (std::int64_t j = 0; j < u; ++j) sum_abs_c += std::abs(req_.c[static_cast<std::size_t>(j)]);
    constant_ = separation_objective(zero_theta(shape_), req_);
    // Covers the summation noise of node_bound() and of canonical leaf
    // evaluations, so pruning never cuts a leaf that evaluates an ulp above
    // the bound. Kept tiny: anything larger keeps exactly-tied subtrees open.
    const double eps = std::numeric_limits<double>::epsilon();
    margin_ = 4.0 * eps * static_cast<double>(u + 1) *
              (std::abs(constant_) + req_.lambda * sum_abs_c);
    initial_bound_ = node_bound();

    if (warm != nullptr) {
      check_theta_shape(*warm, shape_);
      best_.theta = *warm;
    } else {
      best_.theta = zero_theta(shape_);
    }
    best_.objective = separation_objective(best_.theta, req_);
    if (target_) floor_ = *target_;
  }

  ExactSeparationResult run() {
    if (target_ && best_.objective > *target_) {
      best_.early_stopped = true;
      best_.dual_bound = initial_bound_;
      best_.nodes = 0;
      return best_;
    }
    search();
    best_.nodes = nodes_;
    best_.early_stopped = stopped_;
    // With no early-stop target the search is exhaustive and the incumbent is
    // the exact optimum. With a target, subtrees bounded at or below it may
    // have been cut; the certified bound is then the worst such cut.
    best_.dual_bound = stopped_ ? initial_bound_ : std::max(best_.objective, floor_cut_);
    return best_;
  }

 private:
  std::span<const std::int32_t> entries_of(int b) const {
    return obs_.entries_at(bit_mode_[static_cast<std::size_t>(b)],
                           bit_coord_[static_cast<std::size_t>(b)]);
  }

  void fix(int b, std::int8_t v) {
    state_[static_cast<std::size_t>(b)] = v;
    trail_.push_back(static_cast<std::int32_t>(b * 2 + v));
    for (std::int32_t j : entries_of(b)) {
      free_cnt_[static_cast<std::size_t>(j)]--;
      if (v == kZero) zero_cnt_[static_cast<std::size_t>(j)]++;
    }
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::int32_t rec = trail_.back();
      trail_.pop_back();
      const int b = rec / 2;
      const auto v = static_cast<std::int8_t>(rec % 2);
      state_[static_cast<std::size_t>(b)] = kFree;
      for (std::int32_t j : entries_of(b)) {
        free_cnt_[static_cast<std::size_t>(j)]++;
        if (v == kZero) zero_cnt_[static_cast<std::size_t>(j)]--;
      }
    }
  }

  // Bound ingredients recomputed in fixed entry order from the integer
  // alive/forced state: attainable negative mass plus coverage that every
  // completion below this node is already committed to.
  double node_bound() const {
    const std::int64_t u = obs_.num_unique();
    double neg_sum = 0.0;
    double pos_forced = 0.0;
    for (std::int64_t j = 0; j < u; ++j) {
      if (zero_cnt_[static_cast<std::size_t>(j)] != 0) continue;
      const double cj = req_.c[static_cast<std::size_t>(j)];
      if (cj < 0.0) {
        neg_sum += cj;
      } else if (cj > 0.0 && free_cnt_[static_cast<std::size_t>(j)] == 0) {
        pos_forced += cj;
      }
    }
    return constant_ - req_.lambda * (neg_sum + pos_forced) + margin_;
  }

  // Dominance fixing to a fixpoint: after this, every free bit touches at
  // least one alive negative and one alive nonnegative entry.
  void propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int b = 0; b < rho_; ++b) {
        if (state_[static_cast<std::size_t>(b)] != kFree) continue;
        bool has_neg = false;
        bool has_pos = false;
        for (std::int32_t j : entries_of(b)) {
          if (zero_cnt_[static_cast<std::size_t>(j)] != 0) continue;
          const double cj = req_.c[static_cast<std::size_t>(j)];
          if (cj < 0.0)
            has_neg = true;
          else if (cj > 0.0)
            has_pos = true;
          if (has_neg && has_pos) break;
        }
        if (!has_neg) {
          fix(b, kZero);
          changed = true;
        } else if (!has_pos) {
          fix(b, kOne);
          changed = true;
        }
      }
    }
  }

  int pick_branch_bit() const {
    int best_bit = -1;
    double best_score = 0.0;
    for (int b = 0; b < rho_; ++b) {
      if (state_[static_cast<std::size_t>(b)] != kFree) continue;
      double score = 0.0;
      for (std::int32_t j : entries_of(b)) {
        if (zero_cnt_[static_cast<std::size_t>(j)] != 0) continue;
        const double cj = req_.c[static_cast<std::size_t>(j)];
        if (cj < 0.0) score -= cj;
      }
      if (score > best_score) {
        best_score = score;
        best_bit = b;
      } else if (best_bit == -1 && score == 0.0) {
        // defensively keep the first free bit; propagation normally leaves
        // no single-signed bits behind
        best_bit = b;
        best_score = 0.0;
      }
    }
    return best_bit;
  }

  void eval_leaf() {
    ThetaVectors theta = zero_theta(shape_);
    for (int b = 0; b < rho_; ++b) {
      if (state_[static_cast<std::size_t>(b)] == kOne) {
        theta[static_cast<std::size_t>(bit_mode_[static_cast<std::size_t>(b)])].set(
            bit_coord_[static_cast<std::size_t>(b)], true);
      }
    }
    const double obj = separation_objective(theta, req_);
    if (obj > best_.objective) {
      best_.theta = std::move(theta);
      best_.objective = obj;
      if (target_ && obj > *target_) stopped_ = true;
    }
  }

  void search() {
    if (stopped_) return;
    if (++nodes_ > budget_) {
      best_.nodes = nodes_;
      best_.early_stopped = false;
      best_.dual_bound = initial_bound_;
      throw ResourceExhaustedError(
          "branch-and-bound node budget of " + std::to_string(budget_) + " exhausted", best_);
    }
    const std::size_t mark = trail_.size();
    propagate();
    const double bound = node_bound();
    if (inspector_) (*inspector_)(state_, bound);

    const int b = pick_branch_bit();
    if (b < 0) {
      eval_leaf();
      undo_to(mark);
      return;
    }
    if (bound <= best_.objective) {
      undo_to(mark);
      return;
    }
    if (bound <= floor_) {
      // every leaf below stays at or under the early-stop target; certifying
      // that is enough, no need to resolve the subtree exactly
      floor_cut_ = std::max(floor_cut_, bound);
      undo_to(mark);
      return;
    }

    const std::size_t branch_mark = trail_.size();
    fix(b, kOne);
    search();
    undo_to(branch_mark);
    if (!stopped_) {
      fix(b, kZero);
      search();
      undo_to(branch_mark);
    }
    undo_to(mark);
  }

  const SeparationRequest& req_;
  const ObservationSet& obs_;
  const Shape& shape_;
  int p_;
  std::int64_t rho_;
  std::optional<double> target_;
  std::int64_t budget_;
  const NodeInspector* inspector_;

  std::vector<int> bit_mode_;
  std::vector<int> bit_coord_;
  std::vector<std::int8_t> state_;
  std::vector<std::int32_t> zero_cnt_;
  std::vector<std::int32_t> free_cnt_;
  std::vector<std::int32_t> trail_;
  double constant_ = 0.0;
  double margin_ = 0.0;
  double initial_bound_ = 0.0;
  double floor_ = -std::numeric_limits<double>::infinity();
  double floor_cut_ = -std::numeric_limits<double>::infinity();

  ExactSeparationResult best_;
  std::int64_t nodes_ = 0;
  bool stopped_ = false;
};

}  // namespace

ExactSeparationResult exact_separation(const SeparationRequest& req,
                                       std::optional<double> early_stop_target,
                                       std::int64_t node_budget, const ThetaVectors* warm_incumbent,
                                       const NodeInspector* inspector) {
  req.validate();
  if (early_stop_target && !(*early_stop_target > 0.0)) {
    throw std::invalid_argument("early stop target must be positive");
  }
  if (node_budget < 1) throw std::invalid_argument("node budget must be >= 1");
  BnbSearch search(req, early_stop_target, node_budget, warm_incumbent, inspector);
  return search.run();
}

SeparationResult weak_separation(const SeparationRequest& req, const OracleConfig& config,
                                 Rng& rng, const ThetaVectors& incumbent) {
  req.validate();
  const double threshold = req.gap_estimate / req.accuracy;
  SeparationResult result;

  ThetaVectors am_theta = multi_start_am(req, config.am_restarts, config.perturb_prob, rng, incumbent);
  const double am_gap = separation_objective(am_theta, req);
  if (am_gap >= threshold) {
    result.separated = true;
    result.am_succeeded = true;
    result.vertex = Atom{req.lambda, std::move(am_theta)};
    result.gap = am_gap;
    return result;
  }

  ExactSeparationResult exact =
      exact_separation(req, threshold, config.node_budget, &am_theta, nullptr);
  result.used_exact = true;
  result.early_stopped = exact.early_stopped;
  result.bb_nodes = exact.nodes;
  if (exact.early_stopped || exact.objective > threshold) {
    result.separated = true;
    result.vertex = Atom{req.lambda, std::move(exact.theta)};
    result.gap = exact.objective;
    return result;
  }
  // Completed search certifying a bound <= Phi/K <= Phi: FALSE.
  result.separated = false;
  result.dual_bound = exact.dual_bound;
  return result;
}

BruteForceResult brute_force_separation(const SeparationRequest& req) {
  req.validate();
  const ObservationSet& obs = *req.obs;
  const std::int64_t rho = obs.shape().rho();
  if (rho > 24) {
    throw std::invalid_argument("brute force enumeration capped at rho <= 24, got " +
                                std::to_string(rho));
  }
  const int p = obs.shape().order();
  BruteForceResult best;
  best.theta = zero_theta(obs.shape());
  best.objective = separation_objective(best.theta, req);
  const std::uint64_t limit = std::uint64_t{1} << rho;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    ThetaVectors theta = zero_theta(obs.shape());
    int b = 0;
    for (int mode = 0; mode < p; ++mode) {
      for (int k = 0; k < obs.shape().dim(mode); ++k, ++b) {
        if ((mask >> b) & 1u) theta[static_cast<std::size_t>(mode)].set(k, true);
      }
    }
    const double obj = separation_objective(theta, req);
    if (obj > best.objective) {
      best.theta = std::move(theta);
      best.objective = obj;
    }
  }
  return best;
}

}  // namespace nntc
