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
#include <span>
#include <vector>

#include "nntc/atom.hpp"
#include "nntc/shape.hpp"

namespace nntc {

/// Default ceiling on dense materialization (entries).
inline constexpr std::int64_t kDefaultDenseCap = 100'000'000;

/// A convex combination of atoms sharing one scale lambda. Every entry of the
/// represented tensor lies in [0, lambda]. Immutable after construction;
/// construction validates the simplex weights (sum 1 within 1e-12, all
/// nonnegative) and the atom shapes.
class Model {
 public:
  Model(Shape shape, double lambda, std::vector<Atom> atoms, std::vector<double> weights);

  const Shape& shape() const { return shape_; }
  double lambda() const { return lambda_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  Shape shape_;
  double lambda_ = 0.0;
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
};

/// Entry of the model at x: the weighted sum of atom entries.
double reconstruct(const Model& model, const Index& x);

/// All pi() entries in row-major order. Throws when pi() exceeds cap, naming
/// the cap.
std::vector<double> reconstruct_dense(const Model& model, std::int64_t cap = kDefaultDenseCap);

/// Maximum entry value. The model variant materializes densely and is subject
/// to the same cap as reconstruct_dense.
double max_entry(const Model& model, std::int64_t cap = kDefaultDenseCap);
double max_entry(std::span<const double> dense);

}  // namespace nntc
