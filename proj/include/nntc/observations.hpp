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

#include "nntc/shape.hpp"

namespace nntc {

/// Observed samples (x<i>, y<i>) over a tensor shape, plus the deduplicated
/// index set U. Duplicate sample indices are kept in the sample list (the
/// empirical loss averages over all n samples); U collapses them and carries
/// per-entry counts, value sums and value square sums for O(u) loss and
/// gradient evaluation.
///
/// The set U is ordered by first appearance. An incidence structure maps each
/// (mode, coordinate) pair to the U entries that touch it; this is the hot
/// lookup of the separation oracles. Immutable after construction and safe to
/// share across threads.
class ObservationSet {
 public:
  ObservationSet(Shape shape, const std::vector<Index>& indices, const std::vector<double>& values);

  const Shape& shape() const { return shape_; }
  std::int64_t num_samples() const { return static_cast<std::int64_t>(values_.size()); }
  std::int64_t num_unique() const { return static_cast<std::int64_t>(counts_.size()); }

  double value(std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  /// Position of sample i's index inside U.
  std::int32_t position(std::int64_t i) const { return positions_[static_cast<std::size_t>(i)]; }
  std::span<const int> sample_coords(std::int64_t i) const;
  std::span<const double> values() const { return values_; }

  std::span<const int> unique_coords(std::int64_t j) const;
  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const double> value_sums() const { return value_sums_; }
  std::span<const double> value_square_sums() const { return value_square_sums_; }

  /// U entries whose mode-`mode` coordinate equals `coord`.
  std::span<const std::int32_t> entries_at(int mode, int coord) const;

 private:
  Shape shape_;
  std::vector<int> sample_coords_;   // n * p
  std::vector<double> values_;       // n
  std::vector<std::int32_t> positions_;  // n
  std::vector<int> unique_coords_;   // u * p
  std::vector<std::int64_t> counts_;     // u
  std::vector<double> value_sums_;       // u
  std::vector<double> value_square_sums_;  // u
  std::vector<std::int64_t> incidence_offsets_;  // rho + 1
  std::vector<std::int32_t> incidence_;          // u * p entries total
};

}  // namespace nntc
