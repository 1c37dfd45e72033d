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

#include "nntc/atom.hpp"

#include <bit>
#include <stdexcept>

#include "nntc/observations.hpp"

namespace nntc {

int BitVec::count() const {
  int c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

bool Atom::matches(const Shape& shape) const {
  if (static_cast<int>(theta.size()) != shape.order()) return false;
  for (int k = 0; k < shape.order(); ++k) {
    if (theta[static_cast<std::size_t>(k)].size() != shape.dim(k)) return false;
  }
  return true;
}

bool Atom::is_zero() const {
  if (lambda == 0.0) return true;
  for (const auto& t : theta) {
    if (!t.any()) return true;
  }
  return false;
}

bool Atom::selects(std::span<const int> coords) const {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!theta[k].get(coords[k])) return false;
  }
  return true;
}

ThetaVectors zero_theta(const Shape& shape) {
  ThetaVectors t;
  t.reserve(static_cast<std::size_t>(shape.order()));
  for (int k = 0; k < shape.order(); ++k) t.emplace_back(shape.dim(k));
  return t;
}

double atom_entry(const Atom& atom, const Index& x) {
  if (x.coords.size() != atom.theta.size()) {
    throw std::out_of_range("index order does not match atom order");
  }
  for (std::size_t k = 0; k < atom.theta.size(); ++k) {
    if (x.coords[k] < 0 || x.coords[k] >= atom.theta[k].size()) {
      throw std::out_of_range("index out of bounds for atom");
    }
  }
  return atom.selects(x.coords) ? atom.lambda : 0.0;
}

std::vector<double> atom_project(const Atom& atom, const ObservationSet& obs) {
  if (!atom.matches(obs.shape())) {
    throw std::invalid_argument("atom shape does not match observation shape");
  }
  const std::int64_t u = obs.num_unique();
  std::vector<double> out(static_cast<std::size_t>(u), 0.0);
  for (std::int64_t j = 0; j < u; ++j) {
    if (atom.selects(obs.unique_coords(j))) out[static_cast<std::size_t>(j)] = atom.lambda;
  }
  return out;
}

Atom random_vertex(const Shape& shape, double lambda, Rng& rng) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  Atom a;
  a.lambda = lambda;
  a.theta = zero_theta(shape);
  for (int k = 0; k < shape.order(); ++k) {
    for (int i = 0; i < shape.dim(k); ++i) {
      a.theta[static_cast<std::size_t>(k)].set(i, rng.bernoulli(0.5));
    }
  }
  return a;
}

}  // namespace nntc
