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

namespace nntc::kernels {

/// Fixed chunk size for deterministic reductions. Partial sums are formed per
/// chunk in index order and combined in chunk order, so every reduction below
/// returns bit-identical results for any thread count, including one.
inline constexpr std::int64_t kChunk = 8192;

double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double sum_sq(std::span<const double> v);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
double max_value(std::span<const double> v);

/// dense += coeff * indicator(atom.theta). The atom's lambda is NOT applied;
/// callers fold it into coeff. Entries outside the atom's support are left
/// untouched. Parallel over the first mode's support (disjoint slabs), so the
/// result is exact and thread-count independent.
void add_scaled_indicator(std::span<double> dense, const Shape& shape, const Atom& atom,
                          double coeff);

/// Dense CP evaluation: out[x] = sum_q prod_k factors[k][x_k * rank + q].
/// factors[k] is the mode-k factor matrix, row-major r_k x rank.
void cp_dense(const Shape& shape, std::span<const std::vector<double>> factors, int rank,
              std::span<double> out);

/// Quadratic empirical loss from collapsed per-U-entry statistics:
/// (1/n) * sum_j (count_j * psi_j^2 - 2 * psi_j * value_sum_j + value_sq_sum_j).
double quadratic_loss(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                      std::span<const double> value_square_sums, std::span<const double> psi,
                      std::int64_t n);

/// Gradient of the quadratic loss over U: c_j = (2/n) * (count_j * psi_j - value_sum_j).
void residual_gradient(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                       std::span<const double> psi, std::int64_t n, std::span<double> c_out);

/// Plain single-threaded loops, kept as the reference the parallel kernels
/// are tested and benchmarked against.
namespace serial {
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double sum_sq(std::span<const double> v);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
double max_value(std::span<const double> v);
void add_scaled_indicator(std::span<double> dense, const Shape& shape, const Atom& atom,
                          double coeff);
void cp_dense(const Shape& shape, std::span<const std::vector<double>> factors, int rank,
              std::span<double> out);
double quadratic_loss(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                      std::span<const double> value_square_sums, std::span<const double> psi,
                      std::int64_t n);
void residual_gradient(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                       std::span<const double> psi, std::int64_t n, std::span<double> c_out);
}  // namespace serial

}  // namespace nntc::kernels
