#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "envkit/envelopes.hpp"
#include "envkit/random.hpp"
#include "envkit/solvers.hpp"

namespace envkit {

// ---------------------------------------------------------------------------
// Random instances

namespace sample {

/// Eigenvalues drawn uniformly from [lo, hi].
Vector eigenvalues(Rng& rng, std::size_t n, double lo, double hi);
QuadraticFn quadratic(Rng& rng, std::size_t n, double eig_lo, double eig_hi);
/// Any member of the prox catalog on R^n.
ProxFn catalog_fn(Rng& rng, std::size_t n);
/// Catalog members with a catalog conjugate (L1, Zero, symmetric box,
/// positive definite quadratic).
ProxFn conjugable_fn(Rng& rng, std::size_t n);
/// Random full-row-rank m x n affine set passing through `point`.
AffineSet affine_set(Rng& rng, std::size_t m, std::span<const double> point);
/// Box or halfspace containing `point`.
ProxFn set_containing(Rng& rng, std::span<const double> point);

/// Bare envelope whose S2 = t P^a_{gamma g}(s y) carries the averagedness
/// parameters (alpha, beta) implied by s, t, a; eigenvalues of P in
/// [p_lo, p_hi], deltas floored at delta_floor.
GeneralSpec general_spec(Rng& rng, std::size_t n, double p_lo = -1.0, double p_hi = 1.0,
                         double delta_floor = -1.0);

/// A random valid spec of the given kind on R^n.
EnvelopeSpec envelope_spec(Rng& rng, EnvelopeKind kind, std::size_t n);

}  // namespace sample

/// Central-difference gradient, step h = 1e-5 (1 + ||x||).
Vector finite_difference_gradient(const GeneralEnvelope& env, std::span<const double> x);

/// ||fd - grad|| / max(1, ||grad||)
double gradient_fd_error(const GeneralEnvelope& env, std::span<const double> x);

/// F(x + t u) + F(x - t u) - 2 F(x)
double second_difference(const GeneralEnvelope& env, std::span<const double> x, std::span<const double> u,
                         double t);

/// Normalized violations of the two quadratic bounds at (x, y): lower is
/// 1/2 <M d, d> - D, upper is D - 1/2 <L d, d>, with
/// D = F(x) - F(y) - <grad F(y), d>, d = x - y.
struct BoundViolation {
  double lower;
  double upper;
};
BoundViolation theorem_bound_violation(const GeneralEnvelope& env, const BoundPair& b, std::span<const double> x,
                                       std::span<const double> y);

struct GapDescentResult {
  Vector x;
  Vector solution;
  double fp_residual;
  double dist_D;  // ||A s - b||
  double dist_C;
  long long iterations;
};

/// Gradient descent on a convex GAP envelope with gradient-norm targets
/// tightened by 10x per round (at most `rounds` rounds of `round_iter`
/// iterations) until the residual and both feasibility distances are met.
GapDescentResult gap_descent_to_feasibility(const GapSpec& spec, const GeneralEnvelope& env,
                                            std::span<const double> x0, double residual_tol, double feas_tol,
                                            int rounds = 10, int round_iter = 200000);

// ---------------------------------------------------------------------------
// Checks

struct CheckReport {
  std::string name;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string dims;
  std::map<std::string, double> params;
  double worst_violation = 0.0;
  double slack = 0.0;
  bool pass = false;
  /// First exception message raised by a trial, if any.
  std::string error;

  /// Single-line JSON object, numbers rounded to 15 significant digits.
  std::string to_json() const;
};

CheckReport check_theorem_bounds(std::uint64_t seed, int trials);
CheckReport check_corollaries(std::uint64_t seed, int trials);
CheckReport check_conjugate_identities(std::uint64_t seed, int trials);
CheckReport check_dr_admm_duality(std::uint64_t seed, int trials);
CheckReport check_gap_propositions(std::uint64_t seed, int trials);
CheckReport check_prop_relation(std::uint64_t seed, int trials);

struct NamedCheck {
  std::string name;
  std::function<CheckReport(std::uint64_t, int)> run;
};

/// theorem, corollaries, lemmas, duality, gap, prop_relation
const std::vector<NamedCheck>& all_checks();

}  // namespace envkit
