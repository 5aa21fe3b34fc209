#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace envkit {

/// Invalid parameter value (step size, relaxation, range violations).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operands whose sizes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-finite data, non-convergence, singular systems.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vector = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);
double max_abs(std::span<const double> x);
Vector add(std::span<const double> x, std::span<const double> y);
Vector sub(std::span<const double> x, std::span<const double> y);
Vector scaled(double a, std::span<const double> x);
/// a*x + b*y
Vector combine(double a, std::span<const double> x, double b, std::span<const double> y);
bool all_finite(std::span<const double> x);
void require_finite(std::span<const double> x, const char* what);
void require_same_size(std::size_t a, std::size_t b, const char* what);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, Vector row_major);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  Matrix transposed() const;
  Vector column(std::size_t j) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
double max_abs_entry(const Matrix& a);

/// Eigenvalues in ascending order; eigenvectors stored as columns.
struct Spectrum {
  Vector values;
  Matrix vectors;
};

/// Dense symmetric operator with a lazily computed, once-only spectrum.
class SymOperator {
 public:
  SymOperator();
  /// Rejects matrices whose asymmetry exceeds 1e-12 * (1 + max|a_ij|);
  /// accepted input is symmetrized exactly.
  explicit SymOperator(Matrix m);

  static SymOperator identity(std::size_t n);
  static SymOperator zero(std::size_t n);
  static SymOperator diagonal(std::span<const double> d);
  /// V diag(values) V^T
  static SymOperator from_spectrum(const Matrix& vectors, std::span<const double> values);

  std::size_t dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  Vector apply(std::span<const double> x) const;
  /// <Px, x>
  double quadratic_form(std::span<const double> x) const;

  const Spectrum& spectrum() const;
  double lambda_min() const;
  double lambda_max() const;
  /// Largest |lambda|, the spectral norm.
  double norm2() const;
  /// Smallest |lambda|, the smallest singular value.
  double sigma_min() const;
  /// 1e-10 * (1 + max|lambda|)
  double spectral_tolerance() const;

  /// Solves P y = x through the spectrum; throws NumericalError when
  /// sigma_min is below 1e-14 * (1 + norm2).
  Vector solve(std::span<const double> x) const;
  SymOperator inverse() const;

  bool operator==(const SymOperator& other) const { return entries_ == other.entries_; }

 private:
  struct Cache;
  Matrix entries_;
  std::shared_ptr<Cache> cache_;
};

SymOperator operator+(const SymOperator& a, const SymOperator& b);
SymOperator operator-(const SymOperator& a, const SymOperator& b);
SymOperator operator*(double s, const SymOperator& a);

/// Symmetric eigendecomposition (parallel round-robin Jacobi).
Spectrum sym_eig(const SymOperator& p);

/// c0 I + c1 P + c2 P^2
SymOperator poly_of_operator(const SymOperator& p, double c0, double c1, double c2);

/// f(x) = 1/2 <Hx,x> + <h,x> + c
struct QuadraticFn {
  SymOperator H;
  Vector h;
  double c = 0.0;

  QuadraticFn() = default;
  QuadraticFn(SymOperator H_, Vector h_, double c_ = 0.0);

  std::size_t dim() const { return H.dim(); }
  double value(std::span<const double> x) const;
  Vector gradient(std::span<const double> x) const;
};

/// Conjugate of a quadratic with positive definite H; the constant offset is
/// carried in the returned QuadraticFn::c.
QuadraticFn quadratic_conjugate(const QuadraticFn& f);

/// x -> P x + q
struct AffineMap {
  SymOperator P;
  Vector q;

  std::size_t dim() const { return P.dim(); }
  Vector apply(std::span<const double> x) const;
};

/// D = {x | A x = b}, with projection Pi_D x = N x + d.
struct AffineSet {
  Matrix A;
  Vector b;
  SymOperator N;
  Vector d;

  std::size_t dim() const { return A.cols(); }
  Vector project(std::span<const double> x) const;
  /// ||A x - b||
  double residual(std::span<const double> x) const;
};

/// Singular values in descending order (one-sided Jacobi), min(rows, cols) of them.
Vector singular_values(const Matrix& A);

/// Builds the projector onto {x | A x = b}. A must have full row rank
/// (singular values below 1e-12 * sigma_max count as zero).
AffineSet affine_projector(const Matrix& A, const Vector& b);

}  // namespace envkit
