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

#include <vector>

#include "nntc/observations.hpp"

namespace nntc {

/// Current iterate over the unique observed index set U together with the
/// observation statistics needed for O(u) loss and gradient evaluation. The
/// observation set is shared read-only; psi_u is replaced (never mutated in
/// place) by the solver.
struct LossState {
  const ObservationSet* obs = nullptr;
  std::vector<double> psi_u;

  explicit LossState(const ObservationSet& o)
      : obs(&o), psi_u(static_cast<std::size_t>(o.num_unique()), 0.0) {}
  LossState(const ObservationSet& o, std::vector<double> psi) : obs(&o), psi_u(std::move(psi)) {}
};

/// Mean squared error over all n samples, (1/n) sum_i (y_i - psi[pos(i)])^2,
/// evaluated in O(u) from per-entry counts and sums. The average is over
/// samples, not unique indices: duplicates keep their multiplicity.
double loss(const LossState& state);

/// Gradient with respect to psi_u: c_j = (2/n) sum_{i: pos(i)=j} (psi_j - y_i).
std::vector<double> gradient(const LossState& state);

}  // namespace nntc
