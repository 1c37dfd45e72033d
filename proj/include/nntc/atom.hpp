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

#include "nntc/rng.hpp"
#include "nntc/shape.hpp"

namespace nntc {

class ObservationSet;

/// Packed fixed-length bit vector; one per tensor mode inside an Atom.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(int size) : size_(size), words_((static_cast<unsigned>(size) + 63) / 64, 0) {}

  int size() const { return size_; }
  bool get(int i) const { return (words_[static_cast<unsigned>(i) >> 6] >> (i & 63)) & 1u; }
  void set(int i, bool v) {
    std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v)
      words_[static_cast<unsigned>(i) >> 6] |= mask;
    else
      words_[static_cast<unsigned>(i) >> 6] &= ~mask;
  }
  void flip(int i) { words_[static_cast<unsigned>(i) >> 6] ^= std::uint64_t{1} << (i & 63); }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }
  int count() const;

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Per-mode binary indicator vectors. This is the theta part of an Atom and
/// the decision variable of the separation oracles.
using ThetaVectors = std::vector<BitVec>;

/// A scaled binary rank-1 tensor: the entry at x is lambda when every mode's
/// indicator bit x_k is set, otherwise zero. An all-zero indicator in any
/// single mode makes the whole atom the zero tensor, which is legal.
struct Atom {
  double lambda = 0.0;
  ThetaVectors theta;

  bool matches(const Shape& shape) const;
  bool is_zero() const;
  /// Product of indicator bits at the given coordinates (0 or 1).
  bool selects(std::span<const int> coords) const;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.lambda == b.lambda && a.theta == b.theta;
  }
};

/// Theta with every bit cleared (the canonical zero atom's indicators).
ThetaVectors zero_theta(const Shape& shape);

/// Entry value of the atom at x: lambda if all selected indicator bits are 1,
/// else 0. Throws when x is out of bounds for the shape implied by theta.
double atom_entry(const Atom& atom, const Index& x);

/// Projection of the atom onto the observed unique index set U: component j
/// is the atom's entry at U[j].
std::vector<double> atom_project(const Atom& atom, const ObservationSet& obs);

/// Uniform random vertex: every indicator bit is an independent fair coin.
Atom random_vertex(const Shape& shape, double lambda, Rng& rng);

}  // namespace nntc
