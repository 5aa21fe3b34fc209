#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

#include "envkit/linalg.hpp"
#include "envkit/operators.hpp"

namespace envkit {

enum class EnvelopeKind { General, Moreau, FB, DR, ADMM, GAP };

std::string to_string(EnvelopeKind kind);

// ---------------------------------------------------------------------------
// Specifications

/// Bare envelope: S1 = (P, q), S2 = grad f2.
struct GeneralSpec {
  AffineMap S1;
  Potential f2;
  AveragedParams params{0.5, 1.0};
  double scale = 1.0;
};

/// Moreau envelope of f with parameter gamma on R^dim.
struct MoreauSpec {
  double gamma = 1.0;
  ProxFn f = ProxFn::zero();
  std::size_t dim = 1;
};

/// Forward-backward envelope of f + g, f quadratic.
struct FbSpec {
  double gamma = 1.0;
  QuadraticFn f;
  ProxFn g = ProxFn::zero();
};

/// Douglas-Rachford envelope of f + g, f quadratic.
struct DrSpec {
  double gamma = 1.0;
  QuadraticFn f;
  ProxFn g = ProxFn::zero();
};

/// ADMM envelope: Douglas-Rachford on the dual with parameter rho. f must be
/// strongly convex.
struct AdmmSpec {
  double rho = 1.0;
  QuadraticFn f;
  ProxFn g = ProxFn::zero();
};

/// Generalized alternating projections between a closed convex set C (an
/// indicator ProxFn) and an affine set D.
struct GapSpec {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  ProxFn C = ProxFn::zero();
  AffineSet D;
};

using EnvelopeSpec = std::variant<GeneralSpec, MoreauSpec, FbSpec, DrSpec, AdmmSpec, GapSpec>;

EnvelopeKind kind_of(const EnvelopeSpec& spec);

// ---------------------------------------------------------------------------
// Envelope

/// F(x) = scale * (1/2 <Px,x> - f2(Px + q)),
/// grad F(x) = scale * P (x - S2 S1 x), with S1 x = Px + q and S2 = grad f2.
class GeneralEnvelope {
 public:
  /// Validates ||P||_2 <= 1 + 1e-10 and scale > 0.
  GeneralEnvelope(AffineMap S1, Potential f2, AveragedParams params, double scale,
                  EnvelopeKind kind = EnvelopeKind::General);

  EnvelopeKind kind() const { return kind_; }
  std::size_t dim() const { return S1_.dim(); }
  const AffineMap& S1() const { return S1_; }
  const SymOperator& P() const { return S1_.P; }
  const Vector& q() const { return S1_.q; }
  const Potential& f2() const { return f2_; }
  const AveragedParams& params() const { return params_; }
  double scale() const { return scale_; }

  Vector apply_S1(std::span<const double> x) const;
  Vector apply_S2(std::span<const double> y) const;
  /// S2 S1 x
  Vector fixed_point_map(std::span<const double> x) const;

  double value(std::span<const double> x) const;
  Vector gradient(std::span<const double> x) const;
  /// ||x - S2 S1 x||
  double fixed_point_residual(std::span<const double> x) const;

  struct Evaluation {
    double value = 0.0;
    Vector gradient;
    Vector mapped;  // S2 S1 x
    double residual = 0.0;
  };
  /// All quantities at x from a single pass through S1 and S2.
  Evaluation evaluate(std::span<const double> x) const;

 private:
  void check_point(std::span<const double> x) const;

  EnvelopeKind kind_;
  AffineMap S1_;
  Potential f2_;
  AveragedParams params_;
  double scale_;
};

GeneralEnvelope build(const EnvelopeSpec& spec);

// ---------------------------------------------------------------------------
// Quadratic bounds

/// M = scale (P - d_beta P^2), L = scale (P + d_alpha P^2);
/// beta_l = lambda_min(M), beta_u = lambda_max(L).
struct BoundPair {
  SymOperator M;
  SymOperator L;
  double beta_l = 0.0;
  double beta_u = 0.0;
};

/// When lambda(P) lies in [0, 1] and both deltas in [-0.5, 1], beta_l and
/// beta_u are cross-checked against the eigenvalue-endpoint closed forms; a
/// disagreement throws NumericalError.
BoundPair bounds(const GeneralEnvelope& env);

/// lambda_min(P - delta P^2) from the eigenvalues of P (-1 <= lambda <= 1),
/// delta in [-1, 1]: endpoint minimum for delta >= 0, m for delta in
/// [-0.5, 0), otherwise the eigenvalue closest to 1/(2 delta).
double lambda_min_closed_form(std::span<const double> eigs, double delta);

/// lambda_max(P + delta P^2), delta in [-1, 1]: max(psi(m), psi(L)) for
/// delta in [-0.5, 1] (psi(lambda) = lambda + delta lambda^2), otherwise the
/// eigenvalue closest to -1/(2 delta). The endpoint maximum reduces to
/// psi(L) whenever L >= 0 or delta <= 0.5.
double lambda_max_closed_form(std::span<const double> eigs, double delta);

/// Eigenvalues of the GAP bound operators. null0/null1 refer to the
/// eigenspaces of N with eigenvalue 0 (range(A^T)) and 1 (null(A)).
struct GapBoundEigenvalues {
  double lam_M_null0;
  double lam_M_null1;
  double lam_L_null0;
  double lam_L_null1;
};

GapBoundEigenvalues gap_bound_eigenvalues(double alpha1, double alpha2);

// ---------------------------------------------------------------------------
// Non-affine S1

/// Twice differentiable f1 given through point evaluators.
struct SmoothFunction {
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> gradient;
  std::function<SymOperator(std::span<const double>)> hessian;
};

struct ValueAndGradient {
  double value = 0.0;
  Vector gradient;
};

/// F(x) = <grad f1(x), x> - f1(x) - f2(grad f1(x)),
/// grad F(x) = hess f1(x) (x - S2 grad f1(x)).
ValueAndGradient general_envelope_value_nonaffine(const SmoothFunction& f1, const Potential& f2,
                                                  std::span<const double> x);

}  // namespace envkit
