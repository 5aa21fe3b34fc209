// Serial reference kernels vs. their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "envkit/kernels.hpp"
#include "envkit/random.hpp"

using namespace envkit;

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return Matrix(n, n, rng.normal_vector(n * n));
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  const Matrix a = random_matrix(n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

template <auto Kernel>
void bm_matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 1);
  const Vector x = Rng(2).normal_vector(n);
  Vector y(n);
  for (auto _ : state) {
    Kernel(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Kernel>
void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, 3), b = random_matrix(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
}

template <auto Kernel>
void bm_jacobi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_symmetric(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, kernels::kMaxJacobiSweeps));
}

void serial_matvec(const Matrix& a, const Vector& x, Vector& y) { kernels::serial::matvec(a, x, y); }
void parallel_matvec(const Matrix& a, const Vector& x, Vector& y) { kernels::parallel::matvec(a, x, y); }

}  // namespace

BENCHMARK(bm_matvec<serial_matvec>)->Name("matvec/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(bm_matvec<parallel_matvec>)->Name("matvec/parallel")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(bm_matmul<kernels::serial::matmul>)->Name("matmul/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_matmul<kernels::parallel::matmul>)->Name("matmul/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_jacobi<kernels::serial::jacobi_eig>)->Name("jacobi/serial")->RangeMultiplier(2)->Range(16, 128);
BENCHMARK(bm_jacobi<kernels::parallel::jacobi_eig>)->Name("jacobi/parallel")->RangeMultiplier(2)->Range(16, 128);

BENCHMARK_MAIN();
