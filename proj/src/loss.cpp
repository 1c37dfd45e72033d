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

#include "nntc/loss.hpp"

#include <stdexcept>

#include "nntc/kernels.hpp"

namespace nntc {

double loss(const LossState& state) {
  const ObservationSet& obs = *state.obs;
  if (state.psi_u.size() != static_cast<std::size_t>(obs.num_unique())) {
    throw std::invalid_argument("psi_u length does not match the unique index count");
  }
  return kernels::quadratic_loss(obs.counts(), obs.value_sums(), obs.value_square_sums(),
                                 state.psi_u, obs.num_samples());
}

std::vector<double> gradient(const LossState& state) {
  const ObservationSet& obs = *state.obs;
  if (state.psi_u.size() != static_cast<std::size_t>(obs.num_unique())) {
    throw std::invalid_argument("psi_u length does not match the unique index count");
  }
  std::vector<double> c(state.psi_u.size());
  kernels::residual_gradient(obs.counts(), obs.value_sums(), state.psi_u, obs.num_samples(), c);
  return c;
}

}  // namespace nntc
