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

#include "nntc/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace nntc::kernels {

namespace {

// Deterministic chunked reduction: Term(i) values are summed left-to-right
// inside each fixed-size chunk, chunk partials left-to-right at the end.
template <typename Term>
double chunked_sum(std::int64_t size, Term term) {
  if (size == 0) return 0.0;
  const std::int64_t nchunks = (size + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static) if (nchunks > 2)
  for (std::int64_t ci = 0; ci < nchunks; ++ci) {
    const std::int64_t lo = ci * kChunk;
    const std::int64_t hi = std::min(size, lo + kChunk);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(ci)] = acc;
  }
  double total = 0.0;
  for (double x : partial) total += x;
  return total;
}

}  // namespace

double sum(std::span<const double> v) {
  return chunked_sum(static_cast<std::int64_t>(v.size()), [&](std::int64_t i) { return v[i]; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return chunked_sum(static_cast<std::int64_t>(a.size()),
                     [&](std::int64_t i) { return a[i] * b[i]; });
}

double sum_sq(std::span<const double> v) {
  return chunked_sum(static_cast<std::int64_t>(v.size()),
                     [&](std::int64_t i) { return v[i] * v[i]; });
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sum_sq_diff: length mismatch");
  return chunked_sum(static_cast<std::int64_t>(a.size()), [&](std::int64_t i) {
    const double d = a[i] - b[i];
    return d * d;
  });
}

double max_value(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("max_value: empty input");
  double m = v[0];
  const auto size = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static) reduction(max : m) if (size > 4 * kChunk)
  for (std::int64_t i = 0; i < size; ++i) m = std::max(m, v[i]);
  return m;
}

void add_scaled_indicator(std::span<double> dense, const Shape& shape, const Atom& atom,
                          double coeff) {
  if (static_cast<std::int64_t>(dense.size()) != shape.pi()) {
    throw std::invalid_argument("dense buffer size does not match shape");
  }
  if (!atom.matches(shape)) throw std::invalid_argument("atom shape mismatch");
  const int p = shape.order();
  std::vector<std::vector<int>> supp(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    for (int i = 0; i < shape.dim(k); ++i) {
      if (atom.theta[static_cast<std::size_t>(k)].get(i)) supp[static_cast<std::size_t>(k)].push_back(i);
    }
    if (supp[static_cast<std::size_t>(k)].empty()) return;  // zero atom
  }
  std::vector<std::int64_t> stride(static_cast<std::size_t>(p), 1);
  for (int k = p - 2; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = stride[static_cast<std::size_t>(k + 1)] * shape.dim(k + 1);
  }

  const auto& first = supp[0];
  const auto nfirst = static_cast<std::int64_t>(first.size());
#pragma omp parallel for schedule(static) if (shape.pi() > 4 * kChunk)
  for (std::int64_t f = 0; f < nfirst; ++f) {
    const std::int64_t base0 = stride[0] * first[static_cast<std::size_t>(f)];
    // odometer over modes 1..p-2; innermost mode handled as a flat loop
    std::vector<int> pos(static_cast<std::size_t>(p), 0);
    const auto& last = supp[static_cast<std::size_t>(p - 1)];
    while (true) {
      std::int64_t base = base0;
      for (int k = 1; k < p - 1; ++k) {
        base += stride[static_cast<std::size_t>(k)] *
                supp[static_cast<std::size_t>(k)][static_cast<std::size_t>(pos[static_cast<std::size_t>(k)])];
      }
      for (int t : last) dense[static_cast<std::size_t>(base + t)] += coeff;
      int k = p - 2;
      for (; k >= 1; --k) {
        auto& pk = pos[static_cast<std::size_t>(k)];
        if (++pk < static_cast<int>(supp[static_cast<std::size_t>(k)].size())) break;
        pk = 0;
      }
      if (k < 1) break;
    }
  }
}

void cp_dense(const Shape& shape, std::span<const std::vector<double>> factors, int rank,
              std::span<double> out) {
  if (static_cast<std::int64_t>(out.size()) != shape.pi()) {
    throw std::invalid_argument("output buffer size does not match shape");
  }
  const int p = shape.order();
  const std::int64_t pi = shape.pi();
#pragma omp parallel for schedule(static) if (pi > 4 * kChunk)
  for (std::int64_t lin = 0; lin < pi; ++lin) {
    std::int64_t rest = lin;
    double acc = 0.0;
    // decode inline; strides recomputed from dims to keep the loop self-contained
    std::vector<int> coords(static_cast<std::size_t>(p));
    for (int k = p - 1; k >= 0; --k) {
      coords[static_cast<std::size_t>(k)] = static_cast<int>(rest % shape.dim(k));
      rest /= shape.dim(k);
    }
    for (int q = 0; q < rank; ++q) {
      double prod = 1.0;
      for (int k = 0; k < p; ++k) {
        prod *= factors[static_cast<std::size_t>(k)]
                       [static_cast<std::size_t>(coords[static_cast<std::size_t>(k)]) *
                            static_cast<std::size_t>(rank) +
                        static_cast<std::size_t>(q)];
      }
      acc += prod;
    }
    out[static_cast<std::size_t>(lin)] = acc;
  }
}

double quadratic_loss(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                      std::span<const double> value_square_sums, std::span<const double> psi,
                      std::int64_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const double total = chunked_sum(static_cast<std::int64_t>(psi.size()), [&](std::int64_t j) {
    const double s = psi[j];
    return static_cast<double>(counts[j]) * s * s - 2.0 * s * value_sums[j] + value_square_sums[j];
  });
  return inv_n * total;
}

void residual_gradient(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                       std::span<const double> psi, std::int64_t n, std::span<double> c_out) {
  const double scale = 2.0 / static_cast<double>(n);
  const auto u = static_cast<std::int64_t>(psi.size());
#pragma omp parallel for schedule(static) if (u > 4 * kChunk)
  for (std::int64_t j = 0; j < u; ++j) {
    c_out[static_cast<std::size_t>(j)] =
        scale * (static_cast<double>(counts[j]) * psi[static_cast<std::size_t>(j)] -
                 value_sums[static_cast<std::size_t>(j)]);
  }
}

namespace serial {

double sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sum_sq_diff: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double max_value(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("max_value: empty input");
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

void add_scaled_indicator(std::span<double> dense, const Shape& shape, const Atom& atom,
                          double coeff) {
  if (static_cast<std::int64_t>(dense.size()) != shape.pi()) {
    throw std::invalid_argument("dense buffer size does not match shape");
  }
  if (!atom.matches(shape)) throw std::invalid_argument("atom shape mismatch");
  const std::int64_t pi = shape.pi();
  std::vector<int> coords(static_cast<std::size_t>(shape.order()));
  for (std::int64_t lin = 0; lin < pi; ++lin) {
    shape.decode(lin, coords);
    if (atom.selects(coords)) dense[static_cast<std::size_t>(lin)] += coeff;
  }
}

void cp_dense(const Shape& shape, std::span<const std::vector<double>> factors, int rank,
              std::span<double> out) {
  if (static_cast<std::int64_t>(out.size()) != shape.pi()) {
    throw std::invalid_argument("output buffer size does not match shape");
  }
  const int p = shape.order();
  const std::int64_t pi = shape.pi();
  std::vector<int> coords(static_cast<std::size_t>(p));
  for (std::int64_t lin = 0; lin < pi; ++lin) {
    shape.decode(lin, coords);
    double acc = 0.0;
    for (int q = 0; q < rank; ++q) {
      double prod = 1.0;
      for (int k = 0; k < p; ++k) {
        prod *= factors[static_cast<std::size_t>(k)]
                       [static_cast<std::size_t>(coords[static_cast<std::size_t>(k)]) *
                            static_cast<std::size_t>(rank) +
                        static_cast<std::size_t>(q)];
      }
      acc += prod;
    }
    out[static_cast<std::size_t>(lin)] = acc;
  }
}

double quadratic_loss(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                      std::span<const double> value_square_sums, std::span<const double> psi,
                      std::int64_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double s = psi[j];
    acc += static_cast<double>(counts[j]) * s * s - 2.0 * s * value_sums[j] + value_square_sums[j];
  }
  return acc / static_cast<double>(n);
}

void residual_gradient(std::span<const std::int64_t> counts, std::span<const double> value_sums,
                       std::span<const double> psi, std::int64_t n, std::span<double> c_out) {
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    c_out[j] = scale * (static_cast<double>(counts[j]) * psi[j] - value_sums[j]);
  }
}

}  // namespace serial

}  // namespace nntc::kernels
