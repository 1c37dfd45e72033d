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

#include "nntc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nntc/kernels.hpp"

namespace nntc {

Model::Model(Shape shape, double lambda, std::vector<Atom> atoms, std::vector<double> weights)
    : shape_(std::move(shape)), lambda_(lambda), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (lambda_ < 0.0) throw std::invalid_argument("model lambda must be nonnegative");
  if (atoms_.empty()) throw std::invalid_argument("model needs at least one atom");
  if (atoms_.size() != weights_.size()) {
    throw std::invalid_argument("model atom and weight counts differ");
  }
  double wsum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("model weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("model weights must sum to 1 (got " + std::to_string(wsum) + ")");
  }
  for (const Atom& a : atoms_) {
    if (a.lambda != lambda_) throw std::invalid_argument("all atoms must share the model lambda");
    if (!a.matches(shape_)) throw std::invalid_argument("atom shape does not match model shape");
  }
}

double reconstruct(const Model& model, const Index& x) {
  double v = 0.0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    v += model.weights()[j] * atom_entry(model.atoms()[j], x);
  }
  return v;
}

std::vector<double> reconstruct_dense(const Model& model, std::int64_t cap) {
  const std::int64_t pi = model.shape().pi();
  if (pi > cap) {
    throw std::length_error("dense materialization of " + std::to_string(pi) +
                            " entries exceeds the cap of " + std::to_string(cap));
  }
  std::vector<double> dense(static_cast<std::size_t>(pi), 0.0);
  for (std::size_t j = 0; j < model.size(); ++j) {
    kernels::add_scaled_indicator(dense, model.shape(), model.atoms()[j],
                                  model.weights()[j] * model.lambda());
  }
  return dense;
}

double max_entry(const Model& model, std::int64_t cap) {
  const std::vector<double> dense = reconstruct_dense(model, cap);
  return kernels::max_value(dense);
}

double max_entry(std::span<const double> dense) { return kernels::max_value(dense); }

}  // namespace nntc
