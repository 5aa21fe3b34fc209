#pragma once

// Dense kernels behind core-linalg. Every kernel exists twice: a plain serial
// reference and an OpenMP version. The two are required to agree to rounding
// (bitwise for matvec/matmul, within spectral tolerance for the eigensolvers).

#include <cstddef>
#include <span>

#include "envkit/linalg.hpp"

namespace envkit::kernels {

/// Below this dimension the OpenMP kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 32;

/// Sweep budget for both Jacobi variants.
inline constexpr int kMaxJacobiSweeps = 60;

namespace serial {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
Matrix matmul(const Matrix& a, const Matrix& b);
/// Cyclic-by-row Jacobi. Input must be square and symmetric.
Spectrum jacobi_eig(const Matrix& a, int max_sweeps = kMaxJacobiSweeps);

}  // namespace serial

namespace parallel {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
Matrix matmul(const Matrix& a, const Matrix& b);
/// Round-robin (tournament) ordered Jacobi: each round applies n/2 disjoint
/// rotations concurrently.
Spectrum jacobi_eig(const Matrix& a, int max_sweeps = kMaxJacobiSweeps);

}  // namespace parallel

/// sqrt(sum_{i != j} a_ij^2)
double off_diagonal_norm(const Matrix& a);

}  // namespace envkit::kernels
