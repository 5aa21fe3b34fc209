#include "envkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "envkit/format.hpp"

namespace envkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDim = 8;
constexpr int kPairs = 5;
constexpr int kDirections = 20;

double uniform_open_2(Rng& rng) { return 2.0 * (1.0 - rng.uniform()); }

/// Running maximum in which NaN counts as an infinite violation.
struct Worst {
  double value = 0.0;
  void operator()(double v) {
    if (std::isnan(v)) v = kInf;
    value = std::max(value, v);
  }
};

/// Violation of a requirement with its own tolerance, rescaled so that it
/// passes exactly when it is within the report's slack.
double rescale(double violation, double tolerance, double slack) { return violation / tolerance * slack; }

template <class Trial>
CheckReport run_check(CheckReport report, std::uint64_t stream, Trial trial) {
  if (report.trials < 1) throw ParameterError(report.name + ": trials must be >= 1");
  const int T = report.trials;
  std::vector<double> worst(T, 0.0);
  std::vector<std::string> errors(T);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < T; ++t) {
    Rng rng(Rng::derive(report.seed, stream, static_cast<std::uint64_t>(t)));
    try {
      Worst w;
      trial(rng, t, w);
      worst[t] = w.value;
    } catch (const std::exception& e) {
      worst[t] = kInf;
      errors[t] = e.what();
    }
  }
  report.worst_violation = *std::max_element(worst.begin(), worst.end());
  for (const auto& e : errors)
    if (!e.empty()) {
      report.error = e;
      break;
    }
  report.pass = report.worst_violation <= report.slack && report.error.empty();
  return report;
}

CheckReport make_report(const char* name, std::uint64_t seed, int trials, double slack) {
  CheckReport r;
  r.name = name;
  r.seed = seed;
  r.trials = trials;
  r.dims = "n in [1, 8]";
  r.slack = slack;
  return r;
}

Vector random_point(Rng& rng, std::size_t n) { return scaled(3.0, rng.normal_vector(n)); }

double quad(const SymOperator& A, std::span<const double> d) { return A.quadratic_form(d); }

double lncosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Theorem-style quadratic bounds with scalar curvatures.
void scalar_bound_violation(const GeneralEnvelope& env, double lo, double hi, std::span<const double> x,
                            std::span<const double> y, Worst& w) {
  const auto ex = env.evaluate(x);
  const auto ey = env.evaluate(y);
  const Vector d = sub(x, y);
  const double gd = dot(ey.gradient, d);
  const double D = ex.value - ey.value - gd;
  const double dd = dot(d, d);
  const double norm_ = 1.0 + std::abs(ex.value) + std::abs(ey.value) + std::abs(gd);
  w((0.5 * lo * dd - D) / norm_);
  w((D - 0.5 * hi * dd) / norm_);
}

void comp_neg_mono_violation(const GeneralEnvelope& env, std::span<const double> x, std::span<const double> y,
                             Worst& w) {
  const auto& P = env.P();
  const Vector d = sub(x, y);
  const Vector sx = env.apply_S2(env.apply_S1(x));
  const Vector sy = env.apply_S2(env.apply_S1(y));
  const double c = dot(P.apply(sub(sx, sy)), d);
  const Vector pd = P.apply(d);
  const double pd2 = dot(pd, pd);
  const double norm_ = 1.0 + pd2 + std::abs(c);
  w((-env.params().delta_alpha() * pd2 - c) / norm_);
  w((c - env.params().delta_beta() * pd2) / norm_);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sampling

namespace sample {

Vector eigenvalues(Rng& rng, std::size_t n, double lo, double hi) { return rng.uniform_vector(n, lo, hi); }

QuadraticFn quadratic(Rng& rng, std::size_t n, double eig_lo, double eig_hi) {
  const Vector eigs = eigenvalues(rng, n, eig_lo, eig_hi);
  return QuadraticFn(rng.symmetric_with_spectrum(eigs), rng.normal_vector(n));
}

AffineSet affine_set(Rng& rng, std::size_t m, std::span<const double> point) {
  Matrix A = rng.normal_matrix(m, point.size());
  Vector b = A * point;
  return affine_projector(A, b);
}

ProxFn set_containing(Rng& rng, std::span<const double> point) {
  const std::size_t n = point.size();
  if (rng.coin()) {
    Vector lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = rng.uniform() < 0.2 ? -kInf : point[i] - rng.uniform(0.0, 2.0);
      hi[i] = rng.uniform() < 0.2 ? kInf : point[i] + rng.uniform(0.0, 2.0);
    }
    return ProxFn::indicator_box(std::move(lo), std::move(hi));
  }
  Vector a = rng.unit_vector(n);
  const double beta = dot(a, point) + rng.uniform(0.0, 1.0);
  return ProxFn::indicator_halfspace(std::move(a), beta);
}

ProxFn catalog_fn(Rng& rng, std::size_t n) {
  switch (rng.integer(0, 5)) {
    case 0: return ProxFn::quadratic(quadratic(rng, n, 0.0, 2.0));
    case 1: {
      const Vector p = rng.normal_vector(n);
      return ProxFn::indicator_affine(affine_set(rng, rng.integer(1, n), p));
    }
    case 2: return set_containing(rng, rng.normal_vector(n));
    case 3: {
      Vector a = rng.normal_vector(n);
      while (norm(a) == 0.0) a = rng.normal_vector(n);
      return ProxFn::indicator_halfspace(std::move(a), rng.normal());
    }
    case 4: return ProxFn::l1(rng.uniform(0.0, 2.0));
    default: return ProxFn::zero();
  }
}

ProxFn conjugable_fn(Rng& rng, std::size_t n) {
  switch (rng.integer(0, 3)) {
    case 0: return ProxFn::l1(rng.uniform(0.1, 2.0));
    case 1: return ProxFn::zero();
    case 2: {
      const double w = rng.uniform(0.1, 2.0);
      return ProxFn::indicator_box(Vector(n, -w), Vector(n, w));
    }
    default: return ProxFn::quadratic(quadratic(rng, n, 0.2, 3.0));
  }
}

GeneralSpec general_spec(Rng& rng, std::size_t n, double p_lo, double p_hi, double delta_floor) {
  SymOperator P = rng.symmetric_with_spectrum(eigenvalues(rng, n, p_lo, p_hi));
  Vector q = rng.normal_vector(n);
  ProxFn g = catalog_fn(rng, n);
  const double gamma = rng.uniform(0.2, 2.0);
  const double a = 2.0 * (1.0 - rng.uniform()) * 0.975 + 0.05;  // (0.05, 2]
  const double t = rng.uniform(0.2, 1.0);
  const double s = rng.coin() ? 1.0 : -1.0;
  // <t P^a(s x) - t P^a(s y), x - y> lies in [t(1-a), t] ||x-y||^2 for s = 1
  // and in [-t, -t(1-a)] ||x-y||^2 for s = -1.
  double da = s > 0 ? t * (a - 1.0) : t;
  double db = s > 0 ? t : t * (a - 1.0);
  da = std::max(da, delta_floor);
  db = std::max(db, delta_floor);
  return GeneralSpec{AffineMap{std::move(P), std::move(q)},
                     Potential{RelaxedProx(std::move(g), gamma, std::min(a, 2.0)), s * t, s},
                     AveragedParams(0.5 * (1.0 + da), 0.5 * (1.0 + db)), 1.0};
}

EnvelopeSpec envelope_spec(Rng& rng, EnvelopeKind kind, std::size_t n) {
  switch (kind) {
    case EnvelopeKind::General: return general_spec(rng, n);
    case EnvelopeKind::Moreau: return MoreauSpec{rng.uniform(0.2, 3.0), catalog_fn(rng, n), n};
    case EnvelopeKind::FB:
    case EnvelopeKind::DR: {
      QuadraticFn f = quadratic(rng, n, 0.0, 2.0);
      const double gamma = rng.uniform(0.05, 0.95) / std::max(f.H.lambda_max(), 0.5);
      ProxFn g = catalog_fn(rng, n);
      if (kind == EnvelopeKind::FB) return FbSpec{gamma, std::move(f), std::move(g)};
      return DrSpec{gamma, std::move(f), std::move(g)};
    }
    case EnvelopeKind::ADMM:
      return AdmmSpec{rng.uniform(0.3, 3.0), quadratic(rng, n, 0.2, 3.0), catalog_fn(rng, n)};
    case EnvelopeKind::GAP: {
      const Vector p = rng.normal_vector(n);
      const std::size_t m = n == 1 ? 1 : rng.integer(1, n - 1);
      AffineSet D = affine_set(rng, m, p);
      ProxFn C = set_containing(rng, p);
      const double a1 = uniform_open_2(rng);
      const double a2 = uniform_open_2(rng);
      return GapSpec{a1, a2, std::move(C), std::move(D)};
    }
  }
  throw ParameterError("envelope_spec: unknown kind");
}

}  // namespace sample

// ---------------------------------------------------------------------------
// Numerical probes

Vector finite_difference_gradient(const GeneralEnvelope& env, std::span<const double> x) {
  const double h = 1e-5 * (1.0 + norm(x));
  Vector g(x.size());
  Vector xp(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xp[i];
    xp[i] = xi + h;
    const double fp = env.value(xp);
    xp[i] = xi - h;
    const double fm = env.value(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double gradient_fd_error(const GeneralEnvelope& env, std::span<const double> x) {
  const Vector g = env.gradient(x);
  return norm(sub(finite_difference_gradient(env, x), g)) / std::max(1.0, norm(g));
}

double second_difference(const GeneralEnvelope& env, std::span<const double> x, std::span<const double> u,
                         double t) {
  return env.value(combine(1.0, x, t, u)) + env.value(combine(1.0, x, -t, u)) - 2.0 * env.value(x);
}

BoundViolation theorem_bound_violation(const GeneralEnvelope& env, const BoundPair& b, std::span<const double> x,
                                       std::span<const double> y) {
  const auto ex = env.evaluate(x);
  const auto ey = env.evaluate(y);
  const Vector d = sub(x, y);
  const double gd = dot(ey.gradient, d);
  const double D = ex.value - ey.value - gd;
  const double norm_ = 1.0 + std::abs(ex.value) + std::abs(ey.value) + std::abs(gd);
  return {(0.5 * quad(b.M, d) - D) / norm_, (D - 0.5 * quad(b.L, d)) / norm_};
}

// ---------------------------------------------------------------------------
// Report serialization

std::string CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["seed"] = seed;
  j["trials"] = trials;
  j["dims"] = dims;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = round15(v);
  j["params"] = p;
  if (std::isfinite(worst_violation))
    j["worst_violation"] = round15(worst_violation);
  else
    j["worst_violation"] = format_double(worst_violation);
  j["slack"] = round15(slack);
  j["pass"] = pass;
  if (!error.empty()) j["error"] = error;
  return j.dump();
}

GapDescentResult gap_descent_to_feasibility(const GapSpec& spec, const GeneralEnvelope& env,
                                            std::span<const double> x0, double residual_tol, double feas_tol,
                                            int rounds, int round_iter) {
  // Feasibility per unit residual depends on alpha1, alpha2 and the angle
  // between C and D, so the gradient target keeps shrinking until both hold.
  SolverConfig cfg;
  cfg.tol = residual_tol * env.P().sigma_min() * std::min({1.0, spec.alpha1, spec.alpha2});
  cfg.max_iter = round_iter;
  GapDescentResult out{Vector(x0.begin(), x0.end()), {}, kInf, kInf, kInf, 0};
  for (int round = 0; round < rounds; ++round, cfg.tol *= 0.1) {
    const auto res = gradient_descent(env, out.x, cfg);
    out.x = res.x;
    out.iterations += res.trace.records.back().k;
    out.fp_residual = env.fixed_point_residual(out.x);
    out.solution = solution_extract(spec, out.x);
    out.dist_D = spec.D.residual(out.solution);
    out.dist_C = norm(sub(out.solution, prox(spec.C, 1.0, out.solution)));
    if (out.fp_residual <= residual_tol && out.dist_D <= feas_tol && out.dist_C <= feas_tol) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checks

CheckReport check_theorem_bounds(std::uint64_t seed, int trials) {
  auto r = make_report("theorem", seed, trials, 1e-9);
  r.params = {{"pairs_per_trial", kPairs}, {"kinds", 6}};
  return run_check(std::move(r), 1, [](Rng& rng, int t, Worst& w) {
    const auto kind = static_cast<EnvelopeKind>(t % 6);
    const std::size_t n = rng.integer(1, kMaxDim);
    const auto env = build(sample::envelope_spec(rng, kind, n));
    const auto b = bounds(env);
    for (int k = 0; k < kPairs; ++k) {
      const Vector x = random_point(rng, n), y = random_point(rng, n);
      const auto v = theorem_bound_violation(env, b, x, y);
      w(v.lower);
      w(v.upper);
      comp_neg_mono_violation(env, x, y, w);
    }
  });
}

CheckReport check_corollaries(std::uint64_t seed, int trials) {
  auto r = make_report("corollaries", seed, trials, 1e-10);
  r.params = {{"pairs_per_trial", kPairs}, {"psd_tol", 1e-10}};
  return run_check(std::move(r), 2, [](Rng& rng, int t, Worst& w) {
    const std::size_t n = rng.integer(1, kMaxDim);
    switch (t % 4) {
      case 0: {
        // P psd: P - d_beta P^2 psd and the operator bounds hold.
        const auto env = build(sample::general_spec(rng, n, 0.0, 1.0));
        const auto b = bounds(env);
        w(-b.M.lambda_min());
        for (int k = 0; k < kPairs; ++k) {
          const auto v = theorem_bound_violation(env, b, random_point(rng, n), random_point(rng, n));
          w(v.lower);
          w(v.upper);
        }
        break;
      }
      case 1: {
        // P positive definite and contractive, or positive definite with
        // beta < 1: strong convexity w.r.t. P - d_beta P^2.
        auto gs = sample::general_spec(rng, n, 0.05, 0.95);
        if (rng.coin() && gs.params.delta_beta() < 1.0) {
          Vector eigs = sample::eigenvalues(rng, n, 0.05, 1.0);
          eigs[0] = 1.0;
          gs.S1.P = rng.symmetric_with_spectrum(eigs);
        }
        const auto env = build(gs);
        const auto b = bounds(env);
        if (!(b.M.lambda_min() > 0.0)) w(1.0);
        for (int k = 0; k < kPairs; ++k)
          w(theorem_bound_violation(env, b, random_point(rng, n), random_point(rng, n)).lower);
        break;
      }
      case 2: {
        // Scalar curvature bounds for any nonexpansive P, deltas in [-0.5, 1].
        const auto env = build(sample::general_spec(rng, n, -1.0, 1.0, -0.5));
        const auto& eigs = env.P().spectrum().values;
        const double m = eigs.front(), L = eigs.back();
        const double db = env.params().delta_beta(), da = env.params().delta_alpha();
        const double beta_l = std::min(m * (1.0 - db * m), L * (1.0 - db * L));
        const double beta_u = lambda_max_closed_form(eigs, da);
        const double direct_l = poly_of_operator(env.P(), 0.0, 1.0, -db).lambda_min();
        const double direct_u = poly_of_operator(env.P(), 0.0, 1.0, da).lambda_max();
        w(std::abs(beta_l - direct_l) / (1.0 + std::abs(direct_l)));
        w(std::abs(beta_u - direct_u) / (1.0 + std::abs(direct_u)));
        for (int k = 0; k < kPairs; ++k)
          scalar_bound_violation(env, beta_l, beta_u, random_point(rng, n), random_point(rng, n), w);
        break;
      }
      default: {
        // P psd: convex and L(1 + d_alpha L)-smooth.
        const auto env = build(sample::general_spec(rng, n, 0.0, 1.0, -0.5));
        const auto& eigs = env.P().spectrum().values;
        const double L = eigs.back();
        const double beta_u = L * (1.0 + env.params().delta_alpha() * L);
        const auto b = bounds(env);
        w(-b.M.lambda_min());
        for (int k = 0; k < kPairs; ++k) {
          const Vector x = random_point(rng, n), y = random_point(rng, n);
          scalar_bound_violation(env, 0.0, beta_u, x, y, w);
          const double lhs = norm(sub(env.gradient(x), env.gradient(y)));
          w((lhs - beta_u * norm(sub(x, y))) / (1.0 + lhs));
        }
        break;
      }
    }
  });
}

CheckReport check_conjugate_identities(std::uint64_t seed, int trials) {
  auto r = make_report("lemmas", seed, trials, 1e-10);
  r.params = {{"pairs_per_trial", kPairs}};
  return run_check(std::move(r), 3, [](Rng& rng, int t, Worst& w) {
    const std::size_t n = rng.integer(1, kMaxDim);
    switch (t % 4) {
      case 0: {
        // Function bounds <=> gradient bounds for
        // f = sum c_i ln cosh(x_i) + 1/2 <Qx,x> + <h,x>, with M = -Q and
        // L = Q + diag(c) bracketing the Hessian.
        const QuadraticFn qf = sample::quadratic(rng, n, -1.0, 1.0);
        const Vector c = rng.uniform_vector(n, 0.0, 1.0);
        auto f = [&](const Vector& x) {
          double s = qf.value(x);
          for (std::size_t i = 0; i < n; ++i) s += c[i] * lncosh(x[i]);
          return s;
        };
        auto grad = [&](const Vector& x) {
          Vector g = qf.gradient(x);
          for (std::size_t i = 0; i < n; ++i) g[i] += c[i] * std::tanh(x[i]);
          return g;
        };
        const SymOperator M = -1.0 * qf.H;
        const SymOperator L = qf.H + SymOperator::diagonal(c);
        for (int k = 0; k < kPairs; ++k) {
          const Vector x = random_point(rng, n), y = random_point(rng, n);
          const Vector d = sub(x, y);
          const double D = f(x) - f(y) - dot(grad(y), d);
          const double G = dot(sub(grad(x), grad(y)), d);
          const double norm_f = 1.0 + std::abs(f(x)) + std::abs(f(y)) + std::abs(dot(grad(y), d));
          const double norm_g = 1.0 + std::abs(G) + dot(d, d);
          w((-0.5 * quad(M, d) - D) / norm_f);
          w((D - 0.5 * quad(L, d)) / norm_f);
          w((-quad(M, d) - G) / norm_g);
          w((G - quad(L, d)) / norm_g);
        }
        break;
      }
      case 1: {
        // Scaled Lipschitz continuity of a quadratic's gradient.
        const QuadraticFn qf = sample::quadratic(rng, n, -2.0, 2.0);
        const SymOperator L = rng.symmetric_with_spectrum(sample::eigenvalues(rng, n, 0.3, 3.0));
        const auto& s = L.spectrum();
        Vector inv_sqrt(n);
        for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(s.values[i]);
        const Matrix K = SymOperator::from_spectrum(s.vectors, inv_sqrt).matrix();
        const double beta = SymOperator(K * qf.H.matrix() * K).norm2();
        for (int k = 0; k < kPairs; ++k) {
          const Vector x = random_point(rng, n), y = random_point(rng, n);
          const Vector d = sub(x, y);
          const Vector gd = sub(qf.gradient(x), qf.gradient(y));
          const double lhs = std::sqrt(dot(L.solve(gd), gd));
          const double rhs = beta * std::sqrt(quad(L, d));
          w((lhs - rhs) / (1.0 + lhs));
          const double D = std::abs(qf.value(x) - qf.value(y) - dot(qf.gradient(y), d));
          w((D - 0.5 * beta * quad(L, d)) / (1.0 + std::abs(qf.value(x)) + std::abs(qf.value(y)) + D));
        }
        break;
      }
      case 2: {
        // Relaxed prox: a/2-averaged and nonexpansive (beta = 1).
        const RelaxedProx rp(sample::catalog_fn(rng, n), rng.uniform(0.2, 3.0), uniform_open_2(rng));
        const double da = rp.relaxation - 1.0;
        for (int k = 0; k < kPairs; ++k) {
          const Vector x = random_point(rng, n), y = random_point(rng, n);
          const Vector d = sub(x, y);
          const double dd = dot(d, d);
          const double c = dot(sub(relaxed_prox_apply(rp, x), relaxed_prox_apply(rp, y)), d);
          w((-da * dd - c) / dd);
          w((c - dd) / dd);
          w((-dd - c) / dd);
        }
        break;
      }
      default: {
        // Extreme eigenvalues of P - delta P^2 and P + delta P^2.
        const Vector eigs = sample::eigenvalues(rng, n, -1.0, 1.0);
        const SymOperator P = rng.symmetric_with_spectrum(eigs);
        const int regime = (t / 4) % 3;
        const double lo[] = {0.0, -0.5, -1.0}, hi[] = {1.0, 0.0, -0.5};
        const double delta = rng.uniform(lo[regime], hi[regime]);
        double brute_min = kInf, brute_max = -kInf;
        for (double l : eigs) {
          brute_min = std::min(brute_min, l - delta * l * l);
          brute_max = std::max(brute_max, l + delta * l * l);
        }
        const double cf_min = lambda_min_closed_form(eigs, delta);
        const double cf_max = lambda_max_closed_form(eigs, delta);
        w(std::abs(cf_min - brute_min));
        w(std::abs(cf_max - brute_max));
        w(std::abs(poly_of_operator(P, 0.0, 1.0, -delta).lambda_min() - cf_min) / (1.0 + std::abs(cf_min)));
        w(std::abs(poly_of_operator(P, 0.0, 1.0, delta).lambda_max() - cf_max) / (1.0 + std::abs(cf_max)));
        break;
      }
    }
  });
}

CheckReport check_dr_admm_duality(std::uint64_t seed, int trials) {
  auto r = make_report("duality", seed, trials, 1e-9);
  r.dims = "n in [1, 6]";
  r.params = {{"iterations", 50}, {"points_per_trial", kPairs}};
  return run_check(std::move(r), 4, [](Rng& rng, int, Worst& w) {
    const std::size_t n = rng.integer(1, 6);
    const QuadraticFn f = sample::quadratic(rng, n, 0.2, 3.0);
    const ProxFn g = sample::conjugable_fn(rng, n);
    const double rho = rng.uniform(1.05, 3.0) * f.H.lambda_max();
    const double gamma = 1.0 / rho;
    const ProxFn gs = *conjugate(g, n);
    const ProxFn gs_neg = negated_argument(gs);
    const RelaxedProx refl_g(g, gamma, 2.0);

    for (int k = 0; k < kPairs; ++k) {
      const Vector x = random_point(rng, n);
      const double nx = 1.0 + norm(x);
      const Vector lhs1 = relaxed_prox_apply(RelaxedProx(gs, rho, 2.0), x);
      const Vector rhs1 = scaled(-rho, relaxed_prox_apply(refl_g, scaled(gamma, x)));
      w(norm(sub(lhs1, rhs1)) / nx);
      const Vector lhs2 = relaxed_prox_apply(RelaxedProx(gs_neg, rho, 2.0), x);
      const Vector rhs2 = scaled(rho, relaxed_prox_apply(refl_g, scaled(-gamma, x)));
      w(norm(sub(lhs2, rhs2)) / nx);
      const double lhs3 = relaxed_prox_potential(RelaxedProx(gs_neg, rho, 2.0), x);
      const double rhs3 = -rho * rho * relaxed_prox_potential(refl_g, scaled(-gamma, x));
      w(std::abs(lhs3 - rhs3) / (1.0 + std::abs(lhs3)));
    }

    const auto dr = build(DrSpec{gamma, f, g});
    const auto admm = build(AdmmSpec{rho, f, g});
    SolverConfig cfg;
    cfg.alpha = rng.uniform(0.1, 0.9);
    cfg.max_iter = 50;
    cfg.tol = 1e-300;
    cfg.record_iterates = true;
    const Vector z0 = random_point(rng, n);
    const auto zs = averaged_iteration(dr, z0, cfg).trace.iterates;
    const auto vs = averaged_iteration(admm, scaled(rho, z0), cfg).trace.iterates;
    // A run that reaches an exact fixed point stops early; it stays there.
    for (std::size_t k = 0; k < std::max(zs.size(), vs.size()); ++k) {
      const Vector& zr = zs[std::min(k, zs.size() - 1)];
      const Vector& vr = vs[std::min(k, vs.size() - 1)];
      w(norm(sub(zr, scaled(gamma, vr))) / (1.0 + norm(zr)));
      const double fd = dr.value(zr);
      w(std::abs(admm.value(vr) + fd) / (1.0 + std::abs(fd)));
    }
  });
}

CheckReport check_gap_propositions(std::uint64_t seed, int trials) {
  constexpr double kSlack = 1e-10;
  constexpr double kFeasTol = 1e-6;
  constexpr double kResidualTol = 1e-8;
  auto r = make_report("gap", seed, trials, kSlack);
  r.dims = "n in [2, 8]";
  r.params = {{"directions", kDirections},
              {"feasibility_tol", kFeasTol},
              {"residual_tol", kResidualTol},
              {"descent_budget", 2000000}};
  return run_check(std::move(r), 5, [&](Rng& rng, int t, Worst& w) {
    const std::size_t n = rng.integer(2, kMaxDim);
    const std::size_t m = rng.integer(1, n - 1);
    const Vector p = rng.normal_vector(n);
    const AffineSet D = sample::affine_set(rng, m, p);
    const ProxFn C = sample::set_containing(rng, p);
    const bool under = t % 2 == 0;
    const double a1 = under ? rng.uniform(0.2, 0.8) : rng.uniform(1.0, 2.0);
    const double a2 = uniform_open_2(rng);
    const GapSpec spec{a1, a2, C, D};
    const auto env = build(spec);
    const auto b = bounds(env);
    const auto& N = D.N;
    const auto ev = gap_bound_eigenvalues(a1, a2);

    // Explicit M, L against the polynomial forms.
    const SymOperator I = SymOperator::identity(n);
    const SymOperator M_exp = a1 * (1.0 - a1) * (I - N);
    const SymOperator L_exp = (1.0 - a1) * (1.0 + (a2 - 1.0) * (1.0 - a1)) * I +
                              a1 * (1.0 + (a2 - 1.0) * (2.0 - a1)) * N;
    w(max_abs_entry(b.M.matrix() - M_exp.matrix()));
    w(max_abs_entry(b.L.matrix() - L_exp.matrix()));

    // Eigenvalues on the eigenspaces of N.
    const auto& sN = N.spectrum();
    for (std::size_t i = 0; i < n; ++i) {
      const Vector v = sN.vectors.column(i);
      const bool on_null = sN.values[i] > 0.5;
      const double lm = on_null ? ev.lam_M_null1 : ev.lam_M_null0;
      const double ll = on_null ? ev.lam_L_null1 : ev.lam_L_null0;
      w(norm(sub(b.M.apply(v), scaled(lm, v))));
      w(norm(sub(b.L.apply(v), scaled(ll, v))));
    }
    w(std::abs(b.beta_l - std::min((1.0 - a1) * a1, 0.0)));
    w(std::abs(b.beta_u - std::max(ev.lam_L_null0, a2)));

    for (int k = 0; k < kPairs; ++k) {
      const auto v = theorem_bound_violation(env, b, random_point(rng, n), random_point(rng, n));
      w(v.lower);
      w(v.upper);
    }

    // Stationary points are fixed points when alpha1 != 1.
    const double smin = env.P().sigma_min(), pmax = env.P().norm2();
    for (int k = 0; k < kPairs; ++k) {
      const auto e = env.evaluate(random_point(rng, n));
      const double gn = norm(e.gradient);
      w((smin * e.residual - gn) / (1.0 + gn));
      w((gn - pmax * e.residual) / (1.0 + gn));
    }

    // Restricted curvature: convex and a2-smooth along null(A); concave
    // along range(A^T) once alpha1 >= 1.
    for (int k = 0; k < kDirections; ++k) {
      const Vector x = random_point(rng, n);
      const Vector gdir = rng.normal_vector(n);
      const Vector u_null = N.apply(gdir);
      const Vector u_range = sub(gdir, u_null);
      const double fx = std::abs(env.value(x));
      if (norm(u_null) > 1e-8) {
        const Vector u = scaled(1.0 / norm(u_null), u_null);
        const double sd = second_difference(env, x, u, 1.0);
        const double nz = 1.0 + 4.0 * fx + std::abs(sd);
        w(-sd / nz);
        w((sd - a2) / nz);
      }
      if (!under && norm(u_range) > 1e-8) {
        const Vector u = scaled(1.0 / norm(u_range), u_range);
        const double sd = second_difference(env, x, u, 1.0);
        const double nz = 1.0 + 4.0 * fx + std::abs(sd);
        w(sd / nz);
        w((a1 * (1.0 - a1) - sd) / nz);
      }
    }

    if (under) {
      w(-b.M.lambda_min());
      const auto g = gap_descent_to_feasibility(spec, env, random_point(rng, n), kResidualTol, kFeasTol);
      w(rescale(std::max(0.0, g.fp_residual - kResidualTol), kResidualTol, kSlack));
      w(rescale(g.dist_D, kFeasTol, kSlack));
      w(rescale(g.dist_C, kFeasTol, kSlack));
    }
  });
}

CheckReport check_prop_relation(std::uint64_t seed, int trials) {
  auto r = make_report("prop_relation", seed, trials, 1e-10);
  r.params = {{"pairs_per_trial", 10}};
  return run_check(std::move(r), 6, [](Rng& rng, int t, Worst& w) {
    const std::size_t n = rng.integer(1, kMaxDim);
    const double delta = t % 5 == 0 ? 1.0 : t % 5 == 1 ? 0.0 : rng.uniform();
    const bool lipschitz = (t / 5) % 2 == 0;
    SymOperator H = t % 7 == 0
                        ? delta * SymOperator::identity(n)
                        : rng.symmetric_with_spectrum(sample::eigenvalues(rng, n, lipschitz ? -delta : 0.0, delta));
    const auto ap = classify_gradient_operator(lipschitz ? GradientKind::Lipschitz : GradientKind::Cocoercive, delta);
    for (int k = 0; k < 10; ++k) {
      const Vector d = sub(random_point(rng, n), random_point(rng, n));
      const double dd = dot(d, d);
      const double c = quad(H, d);
      w((-ap.delta_alpha() * dd - c) / dd);
      w((c - dd) / dd);
      w((-dd - c) / dd);
      w((c - ap.delta_beta() * dd) / dd);
    }
  });
}

const std::vector<NamedCheck>& all_checks() {
  static const std::vector<NamedCheck> checks = {
      {"theorem", check_theorem_bounds},     {"corollaries", check_corollaries},
      {"lemmas", check_conjugate_identities},     {"duality", check_dr_admm_duality},
      {"gap", check_gap_propositions},       {"prop_relation", check_prop_relation},
  };
  return checks;
}

}  // namespace envkit
