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

#include <cmath>
#include <doctest.h>
#include <vector>

#include "nntc/bcg.hpp"
#include "nntc/experiments.hpp"
#include "nntc/loss.hpp"
#include "test_util.hpp"

using namespace nntc;

namespace {

// minimum loss over the weight simplex on a grid with the given resolution;
// independent of the solver's descent machinery
void enumerate_compositions(int remaining, std::size_t slot, std::vector<int>& alloc,
                            const std::function<void()>& visit) {
  if (slot + 1 == alloc.size()) {
    alloc[slot] = remaining;
    visit();
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    alloc[slot] = v;
    enumerate_compositions(remaining - v, slot + 1, alloc, visit);
  }
}

double grid_min_loss(const ObservationSet& obs, const std::vector<std::vector<double>>& columns,
                     int steps) {
  const std::size_t m = columns.size();
  const auto u = static_cast<std::size_t>(obs.num_unique());
  double best = 1e300;
  std::vector<int> alloc(m, 0);
  enumerate_compositions(steps, 0, alloc, [&] {
    std::vector<double> psi(u, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double w = static_cast<double>(alloc[j]) / steps;
      for (std::size_t i = 0; i < u; ++i) psi[i] += w * columns[j][i];
    }
    best = std::min(best, loss(LossState(obs, psi)));
  });
  return best;
}

}  // namespace

TEST_CASE("active gap") {
  Shape s({2, 2});
  Rng rng(83);
  auto obs = testutil::random_observations(s, 8, rng);
  const auto u = static_cast<std::size_t>(obs.num_unique());

  SUBCASE("a lone atom at its own vertex has no gap") {
    ActiveSet active(obs, 1.0);  // zero atom, psi = 0
    std::vector<double> c(u);
    for (double& x : c) x = 2.0 * rng.uniform() - 1.0;
    CHECK(active_gap(active, c) == 0.0);
  }

  SUBCASE("zero objective has no gap") {
    ActiveSet active(obs, 1.0);
    active.fw_step(random_vertex(s, 1.0, rng), 0.5);
    active.fw_step(random_vertex(s, 1.0, rng), 0.25);
    std::vector<double> c(u, 0.0);
    CHECK(active_gap(active, c) == 0.0);
  }

  SUBCASE("matches direct recomputation on a three-atom set") {
    for (int trial = 0; trial < 20; ++trial) {
      ActiveSet active(obs, 1.5);
      active.fw_step(random_vertex(s, 1.5, rng), 0.3);
      active.fw_step(random_vertex(s, 1.5, rng), 0.4);
      REQUIRE(active.size() >= 2);
      std::vector<double> c(u);
      for (double& x : c) x = 2.0 * rng.uniform() - 1.0;
      double expect = -1e300;
      for (std::size_t j = 0; j < active.size(); ++j) {
        double ip = 0.0;
        for (std::size_t i = 0; i < u; ++i) {
          ip += c[i] * (active.psi_u()[i] - active.column(j)[i]);
        }
        expect = std::max(expect, ip);
      }
      CHECK(active_gap(active, c) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("quadratic line search") {
  Shape s({2, 2});

  SUBCASE("already optimal along the direction") {
    ObservationSet obs(s, {Index{0, 0}, Index{1, 1}}, {0.5, 0.5});
    std::vector<double> psi{0.5, 0.5};
    std::vector<double> d{1.0, -1.0};
    CHECK(line_search_quadratic(psi, d, obs) == 0.0);
  }

  SUBCASE("unit problem steps to the boundary") {
    ObservationSet obs(s, {Index{0, 0}}, {1.0});
    std::vector<double> psi{0.0};
    std::vector<double> d{1.0};
    CHECK(line_search_quadratic(psi, d, obs) == 1.0);
  }

  SUBCASE("zero curvature direction returns zero") {
    ObservationSet obs(s, {Index{0, 0}}, {1.0});
    std::vector<double> psi{0.0};
    std::vector<double> d{0.0};
    CHECK(line_search_quadratic(psi, d, obs) == 0.0);
  }

  SUBCASE("beats sampled steps") {
    Rng rng(89);
    for (int trial = 0; trial < 20; ++trial) {
      auto obs = testutil::random_observations(s, 10, rng);
      const auto u = static_cast<std::size_t>(obs.num_unique());
      std::vector<double> psi(u), d(u);
      for (std::size_t i = 0; i < u; ++i) {
        psi[i] = rng.uniform();
        d[i] = 2.0 * rng.uniform() - 1.0;
      }
      const double t_star = line_search_quadratic(psi, d, obs);
      auto loss_at = [&](double t) {
        std::vector<double> moved(u);
        for (std::size_t i = 0; i < u; ++i) moved[i] = psi[i] + t * d[i];
        return loss(LossState(obs, moved));
      };
      const double best = loss_at(t_star);
      for (int k = 0; k < 100; ++k) {
        CHECK(best <= loss_at(rng.uniform()) + 1e-12);
      }
    }
  }
}

TEST_CASE("solve recovers a single vertex exactly") {
  Shape s({4, 3, 3});
  Rng rng(97);
  Atom truth = random_vertex(s, 1.0, rng);
  while (truth.is_zero()) truth = random_vertex(s, 1.0, rng);

  std::vector<Index> idx = testutil::all_indices(s);
  std::vector<double> val;
  for (const Index& x : idx) val.push_back(atom_entry(truth, x));
  ObservationSet obs(s, idx, val);

  SolverConfig config;
  config.epsilon = 1e-8;
  const SolveResult res = solve(obs, 1.0, config);
  CHECK(res.stats.converged);
  CHECK(res.stats.final_loss <= 1e-10);
  for (std::int64_t j = 0; j < obs.num_unique(); ++j) {
    auto coords = obs.unique_coords(j);
    const Index x = testutil::to_index(coords);
    CHECK(std::abs(reconstruct(res.model, x) - atom_entry(truth, x)) <= 1e-5);
  }
}

TEST_CASE("solve on all-zero data stays at the zero atom") {
  Shape s({3, 3});
  Rng rng(101);
  auto idx = testutil::all_indices(s);
  ObservationSet obs(s, idx, std::vector<double>(idx.size(), 0.0));
  SolverConfig config;
  const SolveResult res = solve(obs, 1.0, config);
  CHECK(res.stats.converged);
  CHECK(res.stats.final_loss == 0.0);
  CHECK(res.stats.fw_steps == 0);
  CHECK(res.model.size() == 1);
  CHECK(res.model.atoms()[0].is_zero());
}

TEST_CASE("epsilon above the initial gap converges immediately") {
  Shape s({3, 3});
  Rng rng(103);
  auto obs = testutil::random_observations(s, 12, rng);
  SolverConfig config;
  config.epsilon = 1e9;
  const SolveResult res = solve(obs, 1.0, config);
  CHECK(res.stats.converged);
  CHECK(res.stats.iterations == 0);
  CHECK(res.stats.fw_steps == 0);
}

TEST_CASE("fixed instance: monotone descent, feasibility, determinism, certificate") {
  const Shape s({5, 5, 5});
  Rng gt_rng(0);
  const GroundTruth truth = generate_ground_truth(s, 5, gt_rng);
  Rng sample_rng(1);
  const ObservationSet obs = sample_observations(truth, 200, sample_rng);

  SolverConfig config;
  config.epsilon = 1e-6;
  config.seed = 0;

  std::vector<double> observed_losses;
  double worst_simplex_defect = 0.0;
  double worst_psi_defect = 0.0;
  SolveObserver observer = [&](const IterationRecord& rec) {
    observed_losses.push_back(rec.loss_value);
    double sum = 0.0;
    for (double w : rec.active->weights()) sum += w;
    worst_simplex_defect = std::max(worst_simplex_defect, std::abs(sum - 1.0));
    // recompute psi from the columns in transposed order
    const auto u = rec.active->psi_u().size();
    for (std::size_t i = 0; i < u; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rec.active->size(); ++j) {
        acc += rec.active->weights()[j] * rec.active->column(j)[i];
      }
      worst_psi_defect = std::max(worst_psi_defect, std::abs(acc - rec.active->psi_u()[i]));
    }
  };

  const SolveResult first = solve(obs, 1.0, config, observer);
  CHECK(first.stats.converged);

  SUBCASE("loss history is nonincreasing") {
    const auto& hist = first.stats.loss_history;
    REQUIRE(hist.size() >= 2);
    for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1] + 1e-12);
  }

  SUBCASE("iterates stay feasible") {
    CHECK(worst_simplex_defect <= 1e-12);
    CHECK(worst_psi_defect <= 1e-9);
  }

  SUBCASE("repeat run is bit-identical") {
    const SolveResult second = solve(obs, 1.0, config);
    CHECK(first.stats.iterations == second.stats.iterations);
    CHECK(first.stats.oracle_calls == second.stats.oracle_calls);
    CHECK(first.stats.am_successes == second.stats.am_successes);
    CHECK(first.stats.early_stops == second.stats.early_stops);
    CHECK(first.stats.phi_halvings == second.stats.phi_halvings);
    CHECK(first.stats.descent_steps == second.stats.descent_steps);
    CHECK(first.stats.fw_steps == second.stats.fw_steps);
    CHECK(first.stats.bb_nodes == second.stats.bb_nodes);
    CHECK(first.stats.final_phi == second.stats.final_phi);
    CHECK(first.stats.final_loss == second.stats.final_loss);
    CHECK(first.stats.loss_history == second.stats.loss_history);
    CHECK(first.model.weights() == second.model.weights());
    CHECK(first.model.atoms().size() == second.model.atoms().size());
  }

  SUBCASE("termination certificate: a fresh exact call confirms the gap") {
    std::vector<double> psi(static_cast<std::size_t>(obs.num_unique()), 0.0);
    for (std::size_t j = 0; j < first.model.size(); ++j) {
      const auto col = atom_project(first.model.atoms()[j], obs);
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += first.model.weights()[j] * col[i];
    }
    LossState state(obs, psi);
    SeparationRequest req{&obs, gradient(state), psi, 1.0, config.oracle_accuracy, 1.0};
    const ExactSeparationResult res = exact_separation(req);
    CHECK(res.objective <= config.epsilon * (1.0 + 1e-6));
  }
}

TEST_CASE("adding a vertex never raises the hull optimum") {
  Shape s({3, 3});
  Rng rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    auto obs = testutil::random_observations(s, 10, rng);
    std::vector<std::vector<double>> columns;
    for (int j = 0; j < 3; ++j) {
      columns.push_back(atom_project(random_vertex(s, 1.0, rng), obs));
    }
    const double before = grid_min_loss(obs, {columns[0], columns[1]}, 100);
    const double after = grid_min_loss(obs, columns, 100);
    CHECK(after <= before + 1e-12);
  }
}
