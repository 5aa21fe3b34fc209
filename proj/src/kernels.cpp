#include "envkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace envkit::kernels {

namespace {

struct Rotation {
  std::size_t p = 0;
  std::size_t q = 0;
  double c = 1.0;
  double s = 0.0;
  bool active = false;
};

// Angle that annihilates a(p,q) in J^T A J (Golub & Van Loan, sym.schur2).
Rotation make_rotation(const Matrix& a, std::size_t p, std::size_t q) {
  Rotation r{p, q};
  const double apq = a(p, q);
  if (apq == 0.0) return r;
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double tau = (aqq - app) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  r.c = 1.0 / std::sqrt(1.0 + t * t);
  r.s = t * r.c;
  r.active = true;
  return r;
}

void rotate_rows(Matrix& a, const Rotation& r) {
  const std::size_t n = a.cols();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a(r.p, k);
    const double y = a(r.q, k);
    a(r.p, k) = r.c * x - r.s * y;
    a(r.q, k) = r.s * x + r.c * y;
  }
}

void rotate_cols(Matrix& a, const Rotation& r) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a(k, r.p);
    const double y = a(k, r.q);
    a(k, r.p) = r.c * x - r.s * y;
    a(k, r.q) = r.s * x + r.c * y;
  }
}

void check_square_symmetric(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionError("jacobi_eig: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

bool converged(const Matrix& a, double scale) {
  return off_diagonal_norm(a) <= 1e-14 * scale;
}

Spectrum sorted_spectrum(const Matrix& a, const Matrix& v) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  Spectrum out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

[[noreturn]] void fail_convergence(int sweeps, double off, double scale) {
  throw NumericalError("jacobi_eig: no convergence after " + std::to_string(sweeps) +
                       " sweeps (off-diagonal norm " + std::to_string(off) + ", scale " +
                       std::to_string(scale) + ")");
}

}  // namespace

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

namespace serial {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Spectrum jacobi_eig(const Matrix& input, int max_sweeps) {
  check_square_symmetric(input);
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  const double scale = frobenius(a);
  int sweep = 0;
  while (!converged(a, scale)) {
    if (sweep == max_sweeps) fail_convergence(sweep, off_diagonal_norm(a), scale);
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const Rotation r = make_rotation(a, p, q);
        if (!r.active) continue;
        rotate_rows(a, r);
        rotate_cols(a, r);
        rotate_cols(v, r);
        a(p, q) = a(q, p) = 0.0;
      }
    ++sweep;
  }
  return sorted_spectrum(a, v);
}

}  // namespace serial

namespace parallel {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t cols = a.cols();
#pragma omp parallel for schedule(static) if (a.rows() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    const auto row = a.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (a.rows() >= kParallelThreshold)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Spectrum jacobi_eig(const Matrix& input, int max_sweeps) {
  check_square_symmetric(input);
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  const double scale = frobenius(a);

  // Circle-method tournament over an even number of players; the extra
  // player (when n is odd) is a bye.
  const std::size_t players = n + (n % 2);
  std::vector<std::size_t> ring(players);
  std::iota(ring.begin(), ring.end(), std::size_t{0});
  std::vector<Rotation> rotations(players / 2);
  const bool go_parallel = n >= kParallelThreshold;

  int sweep = 0;
  while (!converged(a, scale)) {
    if (sweep == max_sweeps) fail_convergence(sweep, off_diagonal_norm(a), scale);
    for (std::size_t round = 0; round + 1 < players; ++round) {
      for (std::size_t k = 0; k < players / 2; ++k) {
        std::size_t p = ring[k];
        std::size_t q = ring[players - 1 - k];
        if (p > q) std::swap(p, q);
        rotations[k] = (q < n) ? make_rotation(a, p, q) : Rotation{};
      }
      const auto pairs = static_cast<std::ptrdiff_t>(rotations.size());
#pragma omp parallel if (go_parallel)
      {
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < pairs; ++k)
          if (rotations[static_cast<std::size_t>(k)].active)
            rotate_rows(a, rotations[static_cast<std::size_t>(k)]);
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < pairs; ++k)
          if (rotations[static_cast<std::size_t>(k)].active) {
            const Rotation& r = rotations[static_cast<std::size_t>(k)];
            rotate_cols(a, r);
            rotate_cols(v, r);
            a(r.p, r.q) = a(r.q, r.p) = 0.0;
          }
      }
      // Keep player 0 fixed, rotate the rest.
      std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
    }
    ++sweep;
  }
  return sorted_spectrum(a, v);
}

}  // namespace parallel

}  // namespace envkit::kernels
