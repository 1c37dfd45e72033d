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

// Microbenchmarks comparing the OpenMP kernels against their serial
// reference implementations on tensor-sized inputs.

#include <benchmark/benchmark.h>

#include <vector>

#include "nntc/kernels.hpp"
#include "nntc/rng.hpp"

namespace {

std::vector<double> random_vector(std::size_t size, std::uint64_t seed) {
  nntc::Rng rng(seed);
  std::vector<double> v(size);
  for (double& x : v) x = rng.uniform();
  return v;
}

void BM_sum_serial(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(nntc::kernels::serial::sum(v));
}

void BM_sum_omp(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(nntc::kernels::sum(v));
}

void BM_sum_sq_diff_serial(benchmark::State& state) {
  const auto a = random_vector(static_cast<std::size_t>(state.range(0)), 2);
  const auto b = random_vector(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(nntc::kernels::serial::sum_sq_diff(a, b));
}

void BM_sum_sq_diff_omp(benchmark::State& state) {
  const auto a = random_vector(static_cast<std::size_t>(state.range(0)), 2);
  const auto b = random_vector(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(nntc::kernels::sum_sq_diff(a, b));
}

void BM_add_scaled_indicator_serial(benchmark::State& state) {
  const nntc::Shape shape({100, 100, 100});
  nntc::Rng rng(4);
  const nntc::Atom atom = nntc::random_vertex(shape, 1.0, rng);
  std::vector<double> dense(static_cast<std::size_t>(shape.pi()), 0.0);
  for (auto _ : state) {
    nntc::kernels::serial::add_scaled_indicator(dense, shape, atom, 0.5);
    benchmark::ClobberMemory();
  }
}

void BM_add_scaled_indicator_omp(benchmark::State& state) {
  const nntc::Shape shape({100, 100, 100});
  nntc::Rng rng(4);
  const nntc::Atom atom = nntc::random_vertex(shape, 1.0, rng);
  std::vector<double> dense(static_cast<std::size_t>(shape.pi()), 0.0);
  for (auto _ : state) {
    nntc::kernels::add_scaled_indicator(dense, shape, atom, 0.5);
    benchmark::ClobberMemory();
  }
}

void BM_cp_dense_serial(benchmark::State& state) {
  const nntc::Shape shape({100, 100, 100});
  const int rank = 10;
  std::vector<std::vector<double>> factors;
  for (int k = 0; k < shape.order(); ++k) {
    factors.push_back(random_vector(static_cast<std::size_t>(shape.dim(k)) * rank,
                                    static_cast<std::uint64_t>(10 + k)));
  }
  std::vector<double> out(static_cast<std::size_t>(shape.pi()));
  for (auto _ : state) {
    nntc::kernels::serial::cp_dense(shape, factors, rank, out);
    benchmark::ClobberMemory();
  }
}

void BM_cp_dense_omp(benchmark::State& state) {
  const nntc::Shape shape({100, 100, 100});
  const int rank = 10;
  std::vector<std::vector<double>> factors;
  for (int k = 0; k < shape.order(); ++k) {
    factors.push_back(random_vector(static_cast<std::size_t>(shape.dim(k)) * rank,
                                    static_cast<std::uint64_t>(10 + k)));
  }
  std::vector<double> out(static_cast<std::size_t>(shape.pi()));
  for (auto _ : state) {
    nntc::kernels::cp_dense(shape, factors, rank, out);
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_sum_serial)->Arg(1 << 20);
BENCHMARK(BM_sum_omp)->Arg(1 << 20);
BENCHMARK(BM_sum_sq_diff_serial)->Arg(1 << 20);
BENCHMARK(BM_sum_sq_diff_omp)->Arg(1 << 20);
BENCHMARK(BM_add_scaled_indicator_serial);
BENCHMARK(BM_add_scaled_indicator_omp);
BENCHMARK(BM_cp_dense_serial);
BENCHMARK(BM_cp_dense_omp);

BENCHMARK_MAIN();
