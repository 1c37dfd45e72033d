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

#include "nntc/shape.hpp"

#include <stdexcept>

namespace nntc {

Shape::Shape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) {
    throw std::invalid_argument("shape must have at least 2 modes");
  }
  pi_ = 1;
  offsets_.reserve(dims_.size());
  for (int r : dims_) {
    if (r < 1) throw std::invalid_argument("every mode dimension must be >= 1");
    offsets_.push_back(rho_);
    rho_ += r;
    pi_ *= r;
    if (pi_ > kMaxEntries) {
      throw std::invalid_argument("shape has more than " + std::to_string(kMaxEntries) +
                                  " entries; refusing to index it");
    }
  }
  strides_.assign(dims_.size(), 1);
  for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i + 1)] * dims_[static_cast<std::size_t>(i + 1)];
  }
}

bool Shape::contains(std::span<const int> coords) const {
  if (coords.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (coords[i] < 0 || coords[i] >= dims_[i]) return false;
  }
  return true;
}

std::int64_t Shape::linear_index(std::span<const int> coords) const {
  if (!contains(coords)) throw std::out_of_range("index out of bounds for shape " + to_string());
  std::int64_t lin = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) lin += strides_[i] * coords[i];
  return lin;
}

void Shape::decode(std::int64_t linear, std::span<int> coords_out) const {
  if (linear < 0 || linear >= pi_) throw std::out_of_range("linear index out of range");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    coords_out[i] = static_cast<int>(linear / strides_[i]);
    linear %= strides_[i];
  }
}

std::string Shape::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i > 0) s += 'x';
    s += std::to_string(dims_[i]);
  }
  return s;
}

}  // namespace nntc
