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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nntc {

/// Tensor shape r_1 x ... x r_p with p >= 2 modes. Construction rejects
/// shapes whose entry count exceeds kMaxEntries so linear indices stay well
/// inside 64-bit arithmetic.
class Shape {
 public:
  static constexpr std::int64_t kMaxEntries = 1'000'000'000;

  explicit Shape(std::vector<int> dims);
  Shape(std::initializer_list<int> dims) : Shape(std::vector<int>(dims)) {}

  int order() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }
  const std::vector<int>& dims() const { return dims_; }

  /// Sum of mode dimensions (number of indicator bits per atom).
  std::int64_t rho() const { return rho_; }
  /// Product of mode dimensions (number of tensor entries).
  std::int64_t pi() const { return pi_; }

  bool contains(std::span<const int> coords) const;

  /// Row-major linear index, last mode fastest. Coordinates are zero-based.
  std::int64_t linear_index(std::span<const int> coords) const;
  void decode(std::int64_t linear, std::span<int> coords_out) const;

  /// Offset of a mode's block when all per-mode indicator bits are laid out
  /// consecutively as one vector of rho() bits.
  std::int64_t mode_offset(int mode) const { return offsets_[static_cast<std::size_t>(mode)]; }

  std::string to_string() const;  // e.g. "10x10x10"

  friend bool operator==(const Shape& a, const Shape& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::int64_t> strides_;
  std::vector<std::int64_t> offsets_;
  std::int64_t rho_ = 0;
  std::int64_t pi_ = 0;
};

/// A single tensor coordinate tuple, zero-based internally. External file
/// formats are one-based; conversion happens at the I/O boundary.
struct Index {
  std::vector<int> coords;

  Index() = default;
  Index(std::initializer_list<int> c) : coords(c) {}
  explicit Index(std::vector<int> c) : coords(std::move(c)) {}

  friend bool operator==(const Index& a, const Index& b) { return a.coords == b.coords; }
};

}  // namespace nntc
