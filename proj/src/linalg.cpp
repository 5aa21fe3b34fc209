#include "envkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <string>

#include "envkit/kernels.hpp"

namespace envkit {

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_size(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Vector add(std::span<const double> x, std::span<const double> y) { return combine(1.0, x, 1.0, y); }
Vector sub(std::span<const double> x, std::span<const double> y) { return combine(1.0, x, -1.0, y); }

Vector scaled(double a, std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

Vector combine(double a, std::span<const double> x, double b, std::span<const double> y) {
  require_same_size(x.size(), y.size(), "combine");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void require_finite(std::span<const double> x, const char* what) {
  if (!all_finite(x)) throw NumericalError(std::string(what) + ": non-finite entry");
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": size " + std::to_string(a) + " vs " +
                         std::to_string(b));
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  require_same_size(data_.size(), rows * cols, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  require_same_size(a.cols(), x.size(), "matvec");
  Vector y(a.rows());
  kernels::parallel::matvec(a, x, y);
  return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "matmul");
  return kernels::parallel::matmul(a, b);
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix add");
  require_same_size(a.cols(), b.cols(), "matrix add");
  return Matrix(a.rows(), a.cols(), add(a.data(), b.data()));
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix sub");
  require_same_size(a.cols(), b.cols(), "matrix sub");
  return Matrix(a.rows(), a.cols(), sub(a.data(), b.data()));
}

Matrix operator*(double s, const Matrix& a) { return Matrix(a.rows(), a.cols(), scaled(s, a.data())); }

double max_abs_entry(const Matrix& a) { return max_abs(a.data()); }

// ---------------------------------------------------------------------------
// SymOperator

struct SymOperator::Cache {
  std::once_flag once;
  Spectrum spectrum;
};

SymOperator::SymOperator() : cache_(std::make_shared<Cache>()) {}

SymOperator::SymOperator(Matrix m) : entries_(std::move(m)), cache_(std::make_shared<Cache>()) {
  if (entries_.rows() != entries_.cols())
    throw DimensionError("SymOperator: matrix is " + std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()));
  require_finite(entries_.data(), "SymOperator");
  const std::size_t n = entries_.rows();
  const double tol = 1e-12 * (1.0 + max_abs_entry(entries_));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = entries_(i, j);
      const double b = entries_(j, i);
      if (std::abs(a - b) > tol)
        throw ParameterError("SymOperator: matrix is not symmetric at (" + std::to_string(i) +
                             "," + std::to_string(j) + ")");
      entries_(i, j) = entries_(j, i) = 0.5 * (a + b);
    }
}

SymOperator SymOperator::identity(std::size_t n) { return SymOperator(Matrix::identity(n)); }
SymOperator SymOperator::zero(std::size_t n) { return SymOperator(Matrix(n, n)); }
SymOperator SymOperator::diagonal(std::span<const double> d) { return SymOperator(Matrix::diagonal(d)); }

SymOperator SymOperator::from_spectrum(const Matrix& vectors, std::span<const double> values) {
  require_same_size(vectors.cols(), values.size(), "from_spectrum");
  const std::size_t n = vectors.rows();
  Matrix scaled_v = vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < values.size(); ++k) scaled_v(i, k) *= values[k];
  return SymOperator(scaled_v * vectors.transposed());
}

Vector SymOperator::apply(std::span<const double> x) const { return entries_ * x; }

double SymOperator::quadratic_form(std::span<const double> x) const { return dot(apply(x), x); }

const Spectrum& SymOperator::spectrum() const {
  std::call_once(cache_->once, [this] { cache_->spectrum = sym_eig(*this); });
  return cache_->spectrum;
}

double SymOperator::lambda_min() const {
  const auto& v = spectrum().values;
  return v.empty() ? 0.0 : v.front();
}

double SymOperator::lambda_max() const {
  const auto& v = spectrum().values;
  return v.empty() ? 0.0 : v.back();
}

double SymOperator::norm2() const { return max_abs(spectrum().values); }

double SymOperator::sigma_min() const {
  const auto& v = spectrum().values;
  double m = v.empty() ? 0.0 : std::abs(v.front());
  for (double l : v) m = std::min(m, std::abs(l));
  return m;
}

double SymOperator::spectral_tolerance() const { return 1e-10 * (1.0 + norm2()); }

Vector SymOperator::solve(std::span<const double> x) const {
  require_same_size(dim(), x.size(), "SymOperator::solve");
  if (sigma_min() <= 1e-14 * (1.0 + norm2()))
    throw NumericalError("SymOperator::solve: operator is singular (sigma_min = " +
                         std::to_string(sigma_min()) + ")");
  const auto& s = spectrum();
  const Matrix& v = s.vectors;
  Vector coeff = v.transposed() * x;
  for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] /= s.values[k];
  return v * coeff;
}

SymOperator SymOperator::inverse() const {
  if (sigma_min() <= 1e-14 * (1.0 + norm2()))
    throw NumericalError("SymOperator::inverse: operator is singular (sigma_min = " +
                         std::to_string(sigma_min()) + ")");
  const auto& s = spectrum();
  Vector inv(s.values.size());
  for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / s.values[k];
  return from_spectrum(s.vectors, inv);
}

SymOperator operator+(const SymOperator& a, const SymOperator& b) {
  return SymOperator(a.matrix() + b.matrix());
}
SymOperator operator-(const SymOperator& a, const SymOperator& b) {
  return SymOperator(a.matrix() - b.matrix());
}
SymOperator operator*(double s, const SymOperator& a) { return SymOperator(s * a.matrix()); }

Spectrum sym_eig(const SymOperator& p) { return kernels::parallel::jacobi_eig(p.matrix()); }

SymOperator poly_of_operator(const SymOperator& p, double c0, double c1, double c2) {
  const std::size_t n = p.dim();
  Matrix out = (c2 != 0.0) ? c2 * (p.matrix() * p.matrix()) : Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) += c1 * p(i, j);
  for (std::size_t i = 0; i < n; ++i) out(i, i) += c0;
  require_finite(out.data(), "poly_of_operator");
  // P^2 from a symmetric P is symmetric up to rounding; average the halves.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return SymOperator(std::move(out));
}

// ---------------------------------------------------------------------------
// QuadraticFn

QuadraticFn::QuadraticFn(SymOperator H_, Vector h_, double c_)
    : H(std::move(H_)), h(std::move(h_)), c(c_) {
  require_same_size(H.dim(), h.size(), "QuadraticFn");
  require_finite(h, "QuadraticFn");
}

double QuadraticFn::value(std::span<const double> x) const {
  return 0.5 * H.quadratic_form(x) + dot(h, x) + c;
}

Vector QuadraticFn::gradient(std::span<const double> x) const { return add(H.apply(x), h); }

QuadraticFn quadratic_conjugate(const QuadraticFn& f) {
  if (f.H.lambda_min() <= 1e-12)
    throw NumericalError("quadratic_conjugate: H must be positive definite (lambda_min = " +
                         std::to_string(f.H.lambda_min()) + ")");
  SymOperator h_inv = f.H.inverse();
  Vector h_inv_h = h_inv.apply(f.h);
  return QuadraticFn(h_inv, scaled(-1.0, h_inv_h), 0.5 * dot(h_inv_h, f.h) - f.c);
}

// ---------------------------------------------------------------------------
// Affine maps and sets

Vector AffineMap::apply(std::span<const double> x) const { return add(P.apply(x), q); }

Vector AffineSet::project(std::span<const double> x) const { return add(N.apply(x), d); }

double AffineSet::residual(std::span<const double> x) const { return norm(sub(A * x, b)); }

Vector singular_values(const Matrix& A) {
  // One-sided (Hestenes) Jacobi on the shorter side: rotate pairs of rows
  // (or columns) until mutually orthogonal; the norms are the singular values.
  Matrix w = A.rows() <= A.cols() ? A : A.transposed();
  const std::size_t k = w.rows();
  const std::size_t len = w.cols();
  for (int sweep = 0;; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) {
        const double alpha = dot(w.row(p), w.row(p));
        const double beta = dot(w.row(q), w.row(q));
        const double gamma = dot(w.row(p), w.row(q));
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t j = 0; j < len; ++j) {
          const double x = w(p, j);
          const double y = w(q, j);
          w(p, j) = c * x - s * y;
          w(q, j) = s * x + c * y;
        }
      }
    if (!rotated) break;
    if (sweep == kernels::kMaxJacobiSweeps)
      throw NumericalError("singular_values: no convergence after " +
                           std::to_string(kernels::kMaxJacobiSweeps) + " sweeps");
  }
  Vector sv(k);
  for (std::size_t i = 0; i < k; ++i) sv[i] = norm(w.row(i));
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

AffineSet affine_projector(const Matrix& A, const Vector& b) {
  require_same_size(A.rows(), b.size(), "affine_projector");
  if (A.rows() == 0 || A.cols() == 0) throw DimensionError("affine_projector: empty A");
  require_finite(A.data(), "affine_projector");
  require_finite(b, "affine_projector");
  const Vector sv = singular_values(A);
  const double smax = sv.front();
  const double smin = sv.back();
  if (A.rows() > A.cols() || smax == 0.0 || smin <= 1e-12 * smax)
    throw ParameterError("affine_projector: A (" + std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) +
                         ") is rank deficient; remove redundant rows before building the set");
  // A^T = Q R by Gram-Schmidt with one reorthogonalization pass.
  const std::size_t m = A.rows(), n = A.cols();
  std::vector<Vector> Q;
  Matrix R(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    Vector v(A.row(i).begin(), A.row(i).end());
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) {
        const double c = dot(Q[j], v);
        R(j, i) += c;
        for (std::size_t k = 0; k < n; ++k) v[k] -= c * Q[j][k];
      }
    const double r = norm(v);
    R(i, i) = r;
    for (double& x : v) x /= r;
    Q.push_back(std::move(v));
  }
  // d = Q R^{-T} b is the minimum-norm solution of A x = b.
  Vector y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= R(j, i) * y[j];
    y[i] = s / R(i, i);
  }
  Vector d(n, 0.0);
  Matrix n_mat = Matrix::identity(n);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      d[k] += y[j] * Q[j][k];
      for (std::size_t l = 0; l < n; ++l) n_mat(k, l) -= Q[j][k] * Q[j][l];
    }
  return AffineSet{A, b, SymOperator(std::move(n_mat)), std::move(d)};
}

}  // namespace envkit
