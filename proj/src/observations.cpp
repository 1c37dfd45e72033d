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

#include "nntc/observations.hpp"

#include <stdexcept>
#include <unordered_map>

namespace nntc {

ObservationSet::ObservationSet(Shape shape, const std::vector<Index>& indices,
                               const std::vector<double>& values)
    : shape_(std::move(shape)) {
  const std::size_t n = indices.size();
  const int p = shape_.order();
  if (n == 0) throw std::invalid_argument("observation set needs at least one sample");
  if (values.size() != n) throw std::invalid_argument("indices and values differ in length");

  sample_coords_.reserve(n * static_cast<std::size_t>(p));
  values_.reserve(n);
  positions_.reserve(n);

  std::unordered_map<std::int64_t, std::int32_t> seen;
  seen.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& coords = indices[i].coords;
    const std::int64_t lin = shape_.linear_index(coords);  // validates bounds
    if (values[i] < 0.0) throw std::invalid_argument("observed values must be nonnegative");
    auto [it, inserted] = seen.emplace(lin, static_cast<std::int32_t>(counts_.size()));
    if (inserted) {
      unique_coords_.insert(unique_coords_.end(), coords.begin(), coords.end());
      counts_.push_back(0);
      value_sums_.push_back(0.0);
      value_square_sums_.push_back(0.0);
    }
    const std::int32_t pos = it->second;
    positions_.push_back(pos);
    sample_coords_.insert(sample_coords_.end(), coords.begin(), coords.end());
    values_.push_back(values[i]);
    counts_[static_cast<std::size_t>(pos)] += 1;
    value_sums_[static_cast<std::size_t>(pos)] += values[i];
    value_square_sums_[static_cast<std::size_t>(pos)] += values[i] * values[i];
  }

  // (mode, coordinate) -> touching U entries, CSR layout over rho bit slots.
  const std::int64_t rho = shape_.rho();
  const std::int64_t u = num_unique();
  std::vector<std::int64_t> deg(static_cast<std::size_t>(rho), 0);
  for (std::int64_t j = 0; j < u; ++j) {
    auto c = unique_coords(j);
    for (int k = 0; k < p; ++k) deg[static_cast<std::size_t>(shape_.mode_offset(k) + c[k])]++;
  }
  incidence_offsets_.assign(static_cast<std::size_t>(rho) + 1, 0);
  for (std::int64_t b = 0; b < rho; ++b) {
    incidence_offsets_[static_cast<std::size_t>(b + 1)] =
        incidence_offsets_[static_cast<std::size_t>(b)] + deg[static_cast<std::size_t>(b)];
  }
  incidence_.assign(static_cast<std::size_t>(u) * static_cast<std::size_t>(p), 0);
  std::vector<std::int64_t> cursor(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::int64_t j = 0; j < u; ++j) {
    auto c = unique_coords(j);
    for (int k = 0; k < p; ++k) {
      const auto bit = static_cast<std::size_t>(shape_.mode_offset(k) + c[k]);
      incidence_[static_cast<std::size_t>(cursor[bit]++)] = static_cast<std::int32_t>(j);
    }
  }
}

std::span<const int> ObservationSet::sample_coords(std::int64_t i) const {
  const auto p = static_cast<std::size_t>(shape_.order());
  return {sample_coords_.data() + static_cast<std::size_t>(i) * p, p};
}

std::span<const int> ObservationSet::unique_coords(std::int64_t j) const {
  const auto p = static_cast<std::size_t>(shape_.order());
  return {unique_coords_.data() + static_cast<std::size_t>(j) * p, p};
}

std::span<const std::int32_t> ObservationSet::entries_at(int mode, int coord) const {
  const auto bit = static_cast<std::size_t>(shape_.mode_offset(mode) + coord);
  const auto lo = static_cast<std::size_t>(incidence_offsets_[bit]);
  const auto hi = static_cast<std::size_t>(incidence_offsets_[bit + 1]);
  return {incidence_.data() + lo, hi - lo};
}

}  // namespace nntc
