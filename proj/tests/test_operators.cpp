#include <doctest.h>

#include <cmath>
#include <limits>

#include "envkit/envelopes.hpp"
#include "envkit/operators.hpp"
#include "envkit/random.hpp"
#include "envkit/verify.hpp"
#include "oracles.hpp"

using namespace envkit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AffineSet x1_zero() { return affine_projector(Matrix(1, 2, Vector{1, 0}), Vector{0}); }

}  // namespace

TEST_CASE("prox examples") {
  CHECK(prox(ProxFn::l1(1.0), 1.0, Vector{2.0})[0] == doctest::Approx(1.0));
  const double grid = oracle::grid_argmin([](double x) { return std::abs(x) + 0.5 * (x - 2) * (x - 2); }, -5, 5);
  CHECK(prox(ProxFn::l1(1.0), 1.0, Vector{2.0})[0] == doctest::Approx(grid).epsilon(1e-6));
  CHECK(prox(ProxFn::zero(), 3.7, Vector{1.5, -2.0}) == Vector{1.5, -2.0});
  CHECK(prox(ProxFn::indicator_box(Vector{0}, Vector{kInf}), 1.0, Vector{-2.0})[0] == 0.0);
  const Vector p = prox(ProxFn::indicator_affine(x1_zero()), 0.3, Vector{3, 4});
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(4.0));
  const Vector h = prox(ProxFn::indicator_halfspace(Vector{0, -1}, -1.0), 1.0, Vector{3, -2});
  CHECK(h[0] == doctest::Approx(3.0));
  CHECK(h[1] == doctest::Approx(1.0));
}

TEST_CASE("prox of a quadratic solves the optimality condition") {
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const QuadraticFn f(rng.symmetric_with_spectrum(rng.uniform_vector(n, 0.0, 3.0)), rng.normal_vector(n));
    const double gamma = rng.uniform(0.1, 2.0);
    const Vector z = rng.normal_vector(n);
    const Vector x = prox(ProxFn::quadratic(f), gamma, z);
    // gamma (H x + h) + x - z = 0
    CHECK(norm(add(scaled(gamma, f.gradient(x)), sub(x, z))) <= 1e-11 * (1.0 + norm(z)));
  }
}

TEST_CASE("prox is firmly nonexpansive on the whole catalog") {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const ProxFn g = sample::catalog_fn(rng, n);
    const double gamma = rng.uniform(0.1, 3.0);
    const Vector x = scaled(3.0, rng.normal_vector(n)), y = scaled(3.0, rng.normal_vector(n));
    const Vector d = sub(prox(g, gamma, x), prox(g, gamma, y));
    CHECK(dot(d, d) <= dot(d, sub(x, y)) + 1e-12 * (1.0 + dot(sub(x, y), sub(x, y))));
  }
}

TEST_CASE("Moreau decomposition through catalog conjugates") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const ProxFn g = sample::conjugable_fn(rng, n);
    const auto gs = conjugate(g, n);
    REQUIRE(gs.has_value());
    const double gamma = rng.uniform(0.2, 3.0);
    const Vector x = scaled(3.0, rng.normal_vector(n));
    // x = prox_{gamma g}(x) + gamma prox_{g*/gamma}(x / gamma)
    const Vector rhs = add(prox(g, gamma, x), scaled(gamma, prox(*gs, 1.0 / gamma, scaled(1.0 / gamma, x))));
    CHECK(norm(sub(rhs, x)) <= 1e-10 * (1.0 + norm(x)));
  }
}

TEST_CASE("conjugate mapping inside the catalog") {
  CHECK(conjugate(ProxFn::l1(2.0), 3)->name() == "box");
  CHECK(conjugate(ProxFn::zero(), 2)->name() == "box");
  CHECK(conjugate(ProxFn::indicator_box(Vector{-1, -1}, Vector{1, 1}), 2)->name() == "l1");
  CHECK(conjugate(ProxFn::indicator_box(Vector{0, 0}, Vector{0, 0}), 2)->name() == "zero");
  CHECK_FALSE(conjugate(ProxFn::indicator_halfspace(Vector{1, 0}, 0.0), 2).has_value());
  CHECK_FALSE(conjugate(ProxFn::indicator_box(Vector{0, -1}, Vector{1, 1}), 2).has_value());
}

TEST_CASE("reg_conjugate_value examples") {
  CHECK(reg_conjugate_value(ProxFn::zero(), 1.0, Vector{3, 4}) == doctest::Approx(12.5));
  CHECK(reg_conjugate_value(ProxFn::l1(1.0), 1.0, Vector{2.0}) == doctest::Approx(0.5));
  const double grid = oracle::grid_sup([](double x) { return 2 * x - std::abs(x) - 0.5 * x * x; }, -10, 10);
  CHECK(reg_conjugate_value(ProxFn::l1(1.0), 1.0, Vector{2.0}) == doctest::Approx(grid).epsilon(1e-9));
  CHECK(reg_conjugate_value(ProxFn::indicator_affine(x1_zero()), 1.0, Vector{3, 4}) == doctest::Approx(8.0));
}

TEST_CASE("reg_conjugate_value: 1D catalog against a grid supremum") {
  Rng rng(4);
  for (int k = 0; k < 30; ++k) {
    const ProxFn g = sample::catalog_fn(rng, 1);
    const double gamma = rng.uniform(0.2, 2.0);
    const double y = rng.uniform(-4.0, 4.0);
    const auto obj = [&](double u) {
      const double gv = g.value(Vector{u}, 0.0);
      return std::isinf(gv) ? -kInf : y * u - gamma * gv - 0.5 * u * u;
    };
    // The maximizer is prox_{gamma g}(y); search around it and on a wide grid.
    const double ref = std::max(obj(prox(g, gamma, Vector{y})[0]), oracle::grid_sup(obj, -20, 20));
    CHECK(reg_conjugate_value(g, gamma, Vector{y}) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("relaxed prox examples") {
  const ProxFn halfline = ProxFn::indicator_box(Vector{0}, Vector{kInf});
  CHECK(relaxed_prox_apply(RelaxedProx(ProxFn::l1(1.0), 1.0, 1.0), Vector{2.0})[0] == doctest::Approx(1.0));
  CHECK(relaxed_prox_apply(RelaxedProx(halfline, 1.0, 2.0), Vector{-2.0})[0] == doctest::Approx(2.0));
  const Vector m = relaxed_prox_apply(RelaxedProx(ProxFn::indicator_affine(x1_zero()), 1.0, 0.5), Vector{3, 4});
  CHECK(m[0] == doctest::Approx(1.5));
  CHECK(m[1] == doctest::Approx(4.0));
  CHECK_THROWS_AS(RelaxedProx(ProxFn::zero(), 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(RelaxedProx(ProxFn::zero(), 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(RelaxedProx(ProxFn::zero(), 1.0, 2.5), ParameterError);
}

TEST_CASE("relaxed prox potential examples") {
  for (double a : {0.3, 1.0, 2.0})
    CHECK(relaxed_prox_potential(RelaxedProx(ProxFn::zero(), 1.3, a), Vector{3, 4}) == doctest::Approx(12.5));
  const ProxFn origin = ProxFn::indicator_box(Vector{0}, Vector{0});
  for (double x : {-2.0, 0.5, 3.0})
    CHECK(relaxed_prox_potential(RelaxedProx(origin, 1.0, 2.0), Vector{x}) == doctest::Approx(-0.5 * x * x));
  CHECK(relaxed_prox_potential(RelaxedProx(ProxFn::l1(1.0), 1.0, 2.0), Vector{2.0}) == doctest::Approx(-1.0));
}

TEST_CASE("relaxed prox potential: gradient is the relaxed prox") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = rng.integer(1, 5);
    const RelaxedProx rp(sample::catalog_fn(rng, n), rng.uniform(0.2, 2.0), rng.uniform(0.05, 2.0));
    const Vector x = scaled(2.0, rng.normal_vector(n));
    const Vector g = relaxed_prox_apply(rp, x);
    const double h = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (relaxed_prox_potential(rp, xp) - relaxed_prox_potential(rp, xm)) / (2 * h);
      CHECK(fd == doctest::Approx(g[i]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("Potential composes outer and inner scalings") {
  Rng rng(6);
  const RelaxedProx rp(ProxFn::l1(0.7), 0.8, 1.4);
  const Potential pot{rp, -2.0, -0.5};
  for (int k = 0; k < 10; ++k) {
    const Vector y = rng.normal_vector(3);
    // value(y) = outer p(inner y), so the chain rule gives outer inner prox(inner y).
    const Vector iy = scaled(-0.5, y);
    CHECK(pot.value(y) == doctest::Approx(-2.0 * relaxed_prox_potential(rp, iy)));
    const Vector g = pot.gradient(y);
    const Vector ref = scaled(1.0, relaxed_prox_apply(rp, iy));
    for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == doctest::Approx(ref[i]));
  }
}

TEST_CASE("gradient_step_map examples") {
  const auto a = gradient_step_map(QuadraticFn(SymOperator::identity(2), Vector{0, 0}), 0.5);
  CHECK(max_abs_entry(a.P.matrix() - 0.5 * Matrix::identity(2)) <= 1e-15);
  CHECK(max_abs(a.q) == 0.0);
  const auto b = gradient_step_map(QuadraticFn(SymOperator::diagonal(Vector{1, 3}), Vector{0, 0}), 0.25);
  CHECK(b.P(0, 0) == doctest::Approx(0.75));
  CHECK(b.P(1, 1) == doctest::Approx(0.25));
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const QuadraticFn f(rng.symmetric_with_spectrum(rng.uniform_vector(n, 0.0, 4.0)), rng.normal_vector(n));
    const double gamma = rng.uniform(0.01, 0.99) / f.H.lambda_max();
    const auto s = gradient_step_map(f, gamma);
    CHECK(s.P.lambda_min() > 0.0);
    CHECK(s.P.lambda_max() <= 1.0 + 1e-14);
    const Vector x = rng.normal_vector(n);
    CHECK(norm(sub(s.apply(x), combine(1.0, x, -gamma, f.gradient(x)))) <= 1e-12 * (1.0 + norm(x)));
  }
}

TEST_CASE("reflected_prox_map_quadratic examples") {
  const auto a = reflected_prox_map_quadratic(QuadraticFn(SymOperator::identity(2), Vector{0, 0}), 0.5);
  CHECK(a.P(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(a.P(1, 1) == doctest::Approx(1.0 / 3.0));
  const Vector h{1.0, -2.0};
  const auto b = reflected_prox_map_quadratic(QuadraticFn(SymOperator::zero(2), h), 0.7);
  CHECK(max_abs_entry(b.P.matrix() - Matrix::identity(2)) <= 1e-15);
  CHECK(b.q[0] == doctest::Approx(-1.4));
  CHECK(b.q[1] == doctest::Approx(2.8));
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = rng.integer(1, 6);
    const Vector eigs = rng.uniform_vector(n, 0.0, 3.0);
    const QuadraticFn f(rng.symmetric_with_spectrum(eigs), rng.normal_vector(n));
    const double gamma = rng.uniform(0.1, 2.0);
    const auto r = reflected_prox_map_quadratic(f, gamma);
    // Spectral mapping (1 - gamma l) / (1 + gamma l), compared as sorted lists.
    Vector mapped;
    for (double l : eigs) mapped.push_back((1 - gamma * l) / (1 + gamma * l));
    std::sort(mapped.begin(), mapped.end());
    const auto& got = r.P.spectrum().values;
    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(mapped[i]).epsilon(1e-12));
    // Against 2 prox - I.
    const Vector x = rng.normal_vector(n);
    const Vector ref = sub(scaled(2.0, prox(ProxFn::quadratic(f), gamma, x)), x);
    CHECK(norm(sub(r.apply(x), ref)) <= 1e-12 * (1.0 + norm(x)));
  }
}

TEST_CASE("classify_gradient_operator") {
  const auto c = classify_gradient_operator(GradientKind::Cocoercive, 1.0);
  CHECK(c.alpha == 0.5);
  CHECK(c.beta == 1.0);
  CHECK(c.delta_alpha() == 0.0);
  CHECK(c.delta_beta() == 1.0);
  const auto l1 = classify_gradient_operator(GradientKind::Lipschitz, 1.0);
  CHECK(l1.alpha == 1.0);
  CHECK(l1.beta == 1.0);
  const auto l0 = classify_gradient_operator(GradientKind::Lipschitz, 0.0);
  CHECK(l0.alpha == 0.5);
  CHECK(l0.beta == 0.5);
  CHECK_THROWS_AS(classify_gradient_operator(GradientKind::Lipschitz, 1.5), ParameterError);
  CHECK_THROWS_AS(classify_gradient_operator(GradientKind::Cocoercive, -0.1), ParameterError);
}

TEST_CASE("AveragedParams validation") {
  CHECK_THROWS_AS(AveragedParams(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(AveragedParams(0.5, 1.2), ParameterError);
  CHECK_NOTHROW(AveragedParams(1.0, 1.0));
}

TEST_CASE("ProxFn factories validate their data") {
  CHECK_THROWS_AS(ProxFn::l1(-1.0), ParameterError);
  CHECK_THROWS_AS(ProxFn::indicator_box(Vector{1}, Vector{0}), ParameterError);
  CHECK_THROWS_AS(ProxFn::indicator_box(Vector{0, 0}, Vector{1}), DimensionError);
  CHECK_THROWS_AS(ProxFn::indicator_halfspace(Vector{0, 0}, 1.0), ParameterError);
  CHECK_THROWS_AS(ProxFn::quadratic(QuadraticFn(SymOperator::diagonal(Vector{-1.0}), Vector{0})), ParameterError);
  CHECK_THROWS_AS(prox(ProxFn::l1(1.0), 0.0, Vector{1.0}), ParameterError);
}

TEST_CASE("ProxFn values") {
  CHECK(ProxFn::l1(2.0).value(Vector{1, -3}) == doctest::Approx(8.0));
  CHECK(ProxFn::indicator_box(Vector{0}, Vector{1}).value(Vector{2}) == kInf);
  CHECK(ProxFn::indicator_box(Vector{0}, Vector{1}).value(Vector{0.5}) == 0.0);
  CHECK(ProxFn::indicator_halfspace(Vector{1}, 1.0).value(Vector{0.5}) == 0.0);
  CHECK(ProxFn::indicator_halfspace(Vector{1}, 1.0).value(Vector{1.5}) == kInf);
  CHECK(ProxFn::indicator_affine(x1_zero()).is_indicator());
  CHECK_FALSE(ProxFn::l1(1.0).is_indicator());
  const ProxFn neg = negated_argument(ProxFn::indicator_box(Vector{0}, Vector{1}));
  CHECK(neg.value(Vector{-0.5}) == 0.0);
  CHECK(neg.value(Vector{0.5}) == kInf);
}

TEST_CASE("closed-form extreme eigenvalues of P -/+ delta P^2") {
  SUBCASE("worked example in the concave regime") {
    const Vector eigs{-0.8, 0.2, 1.0};
    CHECK(lambda_min_closed_form(eigs, -0.7) == doctest::Approx(-0.352).epsilon(1e-14));
    CHECK(oracle::psi_min({-0.8, 0.2, 1.0}, 0.7) == doctest::Approx(-0.352).epsilon(1e-14));
  }
  SUBCASE("delta = 0 gives the extreme eigenvalues") {
    const Vector eigs{-0.3, 0.1, 0.9};
    CHECK(lambda_min_closed_form(eigs, 0.0) == -0.3);
    CHECK(lambda_max_closed_form(eigs, 0.0) == 0.9);
  }
  SUBCASE("delta in [0,1] reduces to the endpoints") {
    for (double d = 0.0; d <= 1.0; d += 0.05) {
      const double m = 0.2, L = 0.8;
      CHECK(lambda_min_closed_form(Vector{m, 0.5, L}, d) ==
            doctest::Approx(std::min(m - d * m * m, L - d * L * L)).epsilon(1e-15));
    }
  }
  SUBCASE("counterexample to the endpoint rule for lambda_max with delta > 1/2") {
    // psi(l) = l + l^2 on {-1, -0.5}: psi(-1) = 0, psi(-0.5) = -0.25.
    const Vector eigs{-1.0, -0.5};
    CHECK(lambda_max_closed_form(eigs, 1.0) == doctest::Approx(0.0));
    CHECK(oracle::psi_max({-1.0, -0.5}, 1.0) == doctest::Approx(0.0));
  }
  SUBCASE("delta outside [-1, 1] is rejected") {
    CHECK_THROWS_AS(lambda_min_closed_form(Vector{0.5}, 1.5), ParameterError);
    CHECK_THROWS_AS(lambda_max_closed_form(Vector{0.5}, -1.5), ParameterError);
  }
  SUBCASE("brute force over random spectra in every regime") {
    Rng rng(9);
    for (int k = 0; k < 600; ++k) {
      const std::size_t n = rng.integer(1, 8);
      const Vector eigs = rng.uniform_vector(n, -1.0, 1.0);
      const double lo[] = {0.0, -0.5, -1.0, 0.5}, hi[] = {1.0, 0.0, -0.5, 1.0};
      const double d = rng.uniform(lo[k % 4], hi[k % 4]);
      const std::vector<double> e(eigs.begin(), eigs.end());
      CHECK(std::abs(lambda_min_closed_form(eigs, d) - oracle::psi_min(e, -d)) <= 1e-12);
      CHECK(std::abs(lambda_max_closed_form(eigs, d) - oracle::psi_max(e, d)) <= 1e-12);
    }
  }
}
