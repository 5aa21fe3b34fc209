#include "envkit/random.hpp"

#include <cmath>
#include <numbers>

namespace envkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::integer(std::size_t lo, std::size_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::size_t>(engine_() % span);
}

Vector Rng::normal_vector(std::size_t n) {
  Vector v(n);
  for (auto& x : v) x = normal();
  return v;
}

Vector Rng::uniform_vector(std::size_t n, double lo, double hi) {
  Vector v(n);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

Matrix Rng::normal_matrix(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = normal();
  return m;
}

Matrix Rng::orthogonal(std::size_t n) {
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v;
    double len = 0.0;
    do {
      v = normal_vector(n);
      // Two passes of modified Gram-Schmidt against the accepted columns.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < j; ++k) {
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * v[i];
          for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, k);
        }
      len = norm(v);
    } while (len < 1e-8);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / len;
  }
  return q;
}

SymOperator Rng::symmetric_with_spectrum(std::span<const double> values) {
  return SymOperator::from_spectrum(orthogonal(values.size()), values);
}

Vector Rng::unit_vector(std::size_t n) {
  Vector v;
  double len = 0.0;
  do {
    v = normal_vector(n);
    len = norm(v);
  } while (len < 1e-12);
  return scaled(1.0 / len, v);
}

}  // namespace envkit
