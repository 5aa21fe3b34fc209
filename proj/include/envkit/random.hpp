#pragma once

#include <cstdint>
#include <random>

#include "envkit/linalg.hpp"

namespace envkit {

/// Platform-stable random source. std::mt19937_64 output is fixed by the
/// standard; the real-valued transforms here are written out so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Mixes a base seed with stream identifiers (splitmix64).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [lo, hi].
  std::size_t integer(std::size_t lo, std::size_t hi);
  bool coin() { return (engine_() >> 63) != 0; }

  Vector normal_vector(std::size_t n);
  Vector uniform_vector(std::size_t n, double lo, double hi);
  Matrix normal_matrix(std::size_t rows, std::size_t cols);
  /// Haar-like orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
  Matrix orthogonal(std::size_t n);
  /// V diag(values) V^T with a random orthogonal V.
  SymOperator symmetric_with_spectrum(std::span<const double> values);
  /// Unit vector uniformly distributed on the sphere.
  Vector unit_vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace envkit
