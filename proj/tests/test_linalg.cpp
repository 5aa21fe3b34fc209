#include <doctest.h>

#include <cmath>

#include "envkit/linalg.hpp"
#include "envkit/random.hpp"
#include "oracles.hpp"

using namespace envkit;

namespace {

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("sym_eig: diagonal input") {
  const auto s = sym_eig(SymOperator::diagonal(Vector{2.0, 1.0}));
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.values[1] == doctest::Approx(2.0).epsilon(1e-15));
  // Eigenvector of 1 is e2, eigenvector of 2 is e1 (up to sign).
  CHECK(std::abs(s.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(s.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig: swap matrix") {
  const auto s = sym_eig(SymOperator(Matrix(2, 2, Vector{0, 1, 1, 0})));
  CHECK(s.values[0] == doctest::Approx(-1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
}

TEST_CASE("sym_eig: reconstruction and orthonormality on random symmetric matrices") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 5u, 9u, 40u}) {
    Matrix G = rng.normal_matrix(n, n);
    Matrix A = G + G.transposed();
    const SymOperator S(A);
    const auto& s = S.spectrum();
    const Matrix R = s.vectors * Matrix::diagonal(s.values) * s.vectors.transposed();
    CHECK(max_abs_entry(R - A) <= 1e-10 * (1.0 + max_abs_entry(A)));
    const Matrix VtV = s.vectors.transposed() * s.vectors;
    CHECK(max_abs_entry(VtV - Matrix::identity(n)) <= 1e-12);
    for (std::size_t i = 1; i < n; ++i) CHECK(s.values[i - 1] <= s.values[i]);
  }
}

TEST_CASE("sym_eig: 2x2 matches the closed form") {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const double a = rng.normal(), b = rng.normal(), d = rng.normal();
    const auto ref = oracle::eig2(a, b, d);
    const auto s = sym_eig(SymOperator(Matrix(2, 2, Vector{a, b, b, d})));
    CHECK(std::abs(s.values[0] - ref[0]) <= 1e-13);
    CHECK(std::abs(s.values[1] - ref[1]) <= 1e-13);
  }
}

TEST_CASE("SymOperator rejects non-square and non-symmetric input") {
  CHECK_THROWS_AS(SymOperator(Matrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(SymOperator(Matrix(2, 2, Vector{1, 2, 3, 4})), ParameterError);
}

TEST_CASE("SymOperator: solve and inverse") {
  Rng rng(5);
  const SymOperator H = rng.symmetric_with_spectrum(Vector{0.5, 1.0, 2.0, 4.0});
  const Vector x = rng.normal_vector(4);
  CHECK(max_diff(H.solve(H.apply(x)), x) <= 1e-12);
  const Matrix I = H.matrix() * H.inverse().matrix();
  CHECK(max_abs_entry(I - Matrix::identity(4)) <= 1e-12);
  CHECK(H.lambda_min() == doctest::Approx(0.5));
  CHECK(H.lambda_max() == doctest::Approx(4.0));
  CHECK(H.sigma_min() == doctest::Approx(0.5));
  CHECK_THROWS_AS(SymOperator::diagonal(Vector{1.0, 0.0}).solve(Vector{1.0, 1.0}), NumericalError);
}

TEST_CASE("poly_of_operator examples") {
  SUBCASE("I - I^2 is zero") {
    const auto Z = poly_of_operator(SymOperator::identity(3), 0.0, 1.0, -1.0);
    CHECK(max_abs_entry(Z.matrix()) == 0.0);
  }
  SUBCASE("elementwise lambda + 0.7 lambda^2") {
    const auto R = poly_of_operator(SymOperator::diagonal(Vector{-0.8, 0.2, 1.0}), 0.0, 1.0, 0.7);
    CHECK(R(0, 0) == doctest::Approx(-0.352).epsilon(1e-14));
    CHECK(R(1, 1) == doctest::Approx(0.228).epsilon(1e-14));
    CHECK(R(2, 2) == doctest::Approx(1.7).epsilon(1e-14));
  }
  SUBCASE("projector idempotence") {
    Rng rng(2);
    const auto D = affine_projector(rng.normal_matrix(2, 5), rng.normal_vector(2));
    const auto Z = poly_of_operator(D.N, 0.0, 1.0, -1.0);
    CHECK(max_abs_entry(Z.matrix()) <= 1e-13);
  }
  SUBCASE("matches the matrix polynomial on random operators") {
    Rng rng(8);
    const SymOperator P = rng.symmetric_with_spectrum(rng.uniform_vector(6, -1.0, 1.0));
    const Matrix ref = 0.3 * Matrix::identity(6) + (-1.2) * P.matrix() + 0.5 * (P.matrix() * P.matrix());
    CHECK(max_abs_entry(poly_of_operator(P, 0.3, -1.2, 0.5).matrix() - ref) <= 1e-13);
  }
}

TEST_CASE("affine_projector: coordinate hyperplanes") {
  const auto D0 = affine_projector(Matrix(1, 2, Vector{1, 0}), Vector{0});
  CHECK(max_abs_entry(D0.N.matrix() - Matrix::diagonal(Vector{0, 1})) <= 1e-15);
  CHECK(max_abs(D0.d) == 0.0);

  const auto D3 = affine_projector(Matrix(1, 2, Vector{1, 0}), Vector{3});
  CHECK(D3.d[0] == doctest::Approx(3.0));
  CHECK(D3.d[1] == doctest::Approx(0.0));
  const Vector p = D3.project(Vector{5, 7});
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == doctest::Approx(7.0));
  CHECK(D3.residual(Vector{5, 7}) == doctest::Approx(2.0));
}

TEST_CASE("affine_projector: KKT conditions on random sets") {
  Rng rng(17);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = rng.integer(2, 8), m = rng.integer(1, n);
    const Matrix A = rng.normal_matrix(m, n);
    const Vector b = rng.normal_vector(m);
    const auto D = affine_projector(A, b);
    const Vector x = rng.normal_vector(n);
    const Vector p = D.project(x);
    CHECK(norm(sub(A * p, b)) <= 1e-10 * (1.0 + norm(b)));
    // x - p lies in range(A^T): orthogonal to every null-space direction.
    const Vector y = D.project(rng.normal_vector(n));
    CHECK(std::abs(dot(sub(x, p), sub(y, p))) <= 1e-10 * (1.0 + norm(x) * norm(y)));
    // Projection is idempotent.
    CHECK(max_diff(D.project(p), p) <= 1e-12 * (1.0 + norm(p)));
  }
}

TEST_CASE("affine_projector: accurate on ill-conditioned rows") {
  // Rows nearly parallel: the Gram matrix has condition number ~1e12.
  const double e = 1e-6;
  const Matrix A(2, 3, Vector{1, 0, 0, 1, e, 0});
  const auto D = affine_projector(A, Vector{0, 0});
  // null(A) = span(e3) exactly.
  CHECK(max_abs_entry(D.N.matrix() - Matrix::diagonal(Vector{0, 0, 1})) <= 1e-9);
}

TEST_CASE("affine_projector: rank-deficient A is rejected") {
  const Matrix A(2, 3, Vector{1, 2, 3, 2, 4, 6});
  CHECK_THROWS_WITH_AS(affine_projector(A, Vector{0, 0}), doctest::Contains("redundant rows"), ParameterError);
  CHECK_THROWS_AS(affine_projector(Matrix(1, 2, Vector{1, 0}), Vector{0, 0}), DimensionError);
}

TEST_CASE("quadratic_conjugate examples") {
  SUBCASE("1/2 ||x||^2 is self-conjugate") {
    const auto fs = quadratic_conjugate(QuadraticFn(SymOperator::identity(2), Vector{0, 0}));
    CHECK(fs.value(Vector{3, -1}) == doctest::Approx(5.0));
  }
  SUBCASE("scaling rule") {
    const auto fs = quadratic_conjugate(QuadraticFn(2.0 * SymOperator::identity(2), Vector{0, 0}));
    CHECK(fs.value(Vector{2, 2}) == doctest::Approx(2.0));
  }
  SUBCASE("diag(1,4), h=(1,0) against a coordinate-wise grid supremum") {
    const QuadraticFn f(SymOperator::diagonal(Vector{1, 4}), Vector{1, 0});
    const auto fs = quadratic_conjugate(f);
    for (const Vector mu : {Vector{0.5, 2.0}, Vector{-1.0, 0.3}, Vector{3.0, -4.0}}) {
      // The supremum separates across coordinates for a diagonal H.
      const double s1 = oracle::grid_sup([&](double x) { return mu[0] * x - 0.5 * x * x - x; }, -50, 50);
      const double s2 = oracle::grid_sup([&](double x) { return mu[1] * x - 2.0 * x * x; }, -50, 50);
      CHECK(fs.value(mu) == doctest::Approx(s1 + s2).epsilon(1e-9));
      CHECK(fs.value(mu) == doctest::Approx(0.5 * (mu[0] - 1) * (mu[0] - 1) + mu[1] * mu[1] / 8.0));
    }
  }
  SUBCASE("singular H is rejected") {
    CHECK_THROWS_AS(quadratic_conjugate(QuadraticFn(SymOperator::diagonal(Vector{1, 0}), Vector{0, 0})),
                    NumericalError);
  }
}

TEST_CASE("Fenchel-Young equality for quadratics") {
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const QuadraticFn f(rng.symmetric_with_spectrum(rng.uniform_vector(n, 0.2, 3.0)), rng.normal_vector(n));
    const auto fs = quadratic_conjugate(f);
    const Vector x = rng.normal_vector(n);
    const Vector mu = f.gradient(x);
    CHECK(f.value(x) + fs.value(mu) == doctest::Approx(dot(mu, x)).epsilon(1e-10));
  }
}

TEST_CASE("singular_values") {
  const auto sv = singular_values(Matrix(2, 3, Vector{3, 0, 0, 0, 0, 2}));
  REQUIRE(sv.size() == 2);
  CHECK(sv[0] == doctest::Approx(3.0));
  CHECK(sv[1] == doctest::Approx(2.0));
}

TEST_CASE("Rng: derive is deterministic and stream-separating") {
  CHECK(Rng::derive(7, 1, 0) == Rng::derive(7, 1, 0));
  CHECK(Rng::derive(7, 1, 0) != Rng::derive(7, 2, 0));
  CHECK(Rng::derive(7, 1, 0) != Rng::derive(7, 1, 1));
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const auto k = r.integer(3, 5);
    CHECK((k >= 3 && k <= 5));
  }
  const Matrix Q = r.orthogonal(6);
  CHECK(max_abs_entry(Q.transposed() * Q - Matrix::identity(6)) <= 1e-12);
  CHECK(norm(r.unit_vector(5)) == doctest::Approx(1.0));
}

TEST_CASE("vector helpers validate sizes and finiteness") {
  CHECK_THROWS_AS(add(Vector{1, 2}, Vector{1}), DimensionError);
  CHECK_THROWS_AS(require_finite(Vector{1, NAN}, "x"), NumericalError);
  CHECK(combine(2.0, Vector{1, 1}, -1.0, Vector{0, 3}) == Vector{2, -1});
}
