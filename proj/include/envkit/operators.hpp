#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "envkit/linalg.hpp"

namespace envkit {

// ---------------------------------------------------------------------------
// Proximable functions

namespace prox_fn {

/// 1/2 <Hx,x> + <h,x> + c with H positive semidefinite.
struct Quadratic {
  QuadraticFn f;
};

/// Indicator of {x | Ax = b}.
struct IndicatorAffine {
  AffineSet set;
};

/// Indicator of the box lo <= x <= hi; bounds may be infinite.
struct IndicatorBox {
  Vector lo;
  Vector hi;
};

/// Indicator of {x | <a,x> <= beta}.
struct IndicatorHalfspace {
  Vector a;
  double beta = 0.0;
};

/// weight * ||x||_1
struct L1 {
  double weight = 1.0;
};

struct Zero {};

}  // namespace prox_fn

/// A proper closed convex function with a closed-form proximal operator.
class ProxFn {
 public:
  using Variant = std::variant<prox_fn::Quadratic, prox_fn::IndicatorAffine, prox_fn::IndicatorBox,
                               prox_fn::IndicatorHalfspace, prox_fn::L1, prox_fn::Zero>;

  static ProxFn quadratic(QuadraticFn f);
  static ProxFn indicator_affine(AffineSet set);
  static ProxFn indicator_box(Vector lo, Vector hi);
  static ProxFn indicator_halfspace(Vector a, double beta);
  static ProxFn l1(double weight);
  static ProxFn zero();

  const Variant& variant() const { return v_; }
  std::string name() const;
  bool is_indicator() const;
  /// Fixed dimension of the function's data, or nullopt for L1 and Zero.
  std::optional<std::size_t> dim() const;

  /// g(x); +infinity outside the domain of an indicator. Membership is tested
  /// with absolute tolerance `feas_tol`.
  double value(std::span<const double> x, double feas_tol = 1e-9) const;

 private:
  explicit ProxFn(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// argmin_x g(x) + 1/(2 gamma) ||x - z||^2
Vector prox(const ProxFn& g, double gamma, std::span<const double> z);

/// r*_{gamma g}(y) where r_{gamma g} = gamma g + 1/2 ||.||^2. The supremum is
/// attained at u = prox_{gamma g}(y).
double reg_conjugate_value(const ProxFn& g, double gamma, std::span<const double> y);

/// Conjugate g*, for the catalog members whose conjugate is again a catalog
/// member: L1(w) <-> box [-w, w]^n, Zero <-> box {0}^n, quadratic with
/// positive definite H. Returns nullopt otherwise.
std::optional<ProxFn> conjugate(const ProxFn& g, std::size_t n);

/// g o (-id)
ProxFn negated_argument(const ProxFn& g);

// ---------------------------------------------------------------------------
// Averagedness bookkeeping

/// S is alpha-averaged and beta-negatively averaged.
struct AveragedParams {
  double alpha = 1.0;
  double beta = 1.0;

  /// Validates alpha, beta in (0, 1].
  AveragedParams(double alpha_, double beta_);
  double delta_alpha() const { return 2.0 * alpha - 1.0; }
  double delta_beta() const { return 2.0 * beta - 1.0; }
  bool operator==(const AveragedParams&) const = default;
};

enum class GradientKind { Lipschitz, Cocoercive };

/// Lipschitz(delta): alpha = beta = (delta+1)/2.
/// Cocoercive(1/delta): alpha = 1/2, beta = (delta+1)/2.
AveragedParams classify_gradient_operator(GradientKind kind, double delta);

// ---------------------------------------------------------------------------
// Relaxed proximal maps and their potentials

/// P^alpha_{gamma g} = alpha prox_{gamma g} + (1 - alpha) id; alpha = 2 is the
/// reflection R_{gamma g}.
struct RelaxedProx {
  ProxFn base;
  double gamma;
  double relaxation;

  RelaxedProx(ProxFn base_, double gamma_, double relaxation_);
};

Vector relaxed_prox_apply(const RelaxedProx& rp, std::span<const double> x);

/// p^alpha_{gamma g}(x) = alpha r*_{gamma g}(x) + (1 - alpha)/2 ||x||^2, whose
/// gradient is relaxed_prox_apply.
double relaxed_prox_potential(const RelaxedProx& rp, std::span<const double> x);

/// outer * p^alpha_{gamma g}(inner * y). With outer = -rho^2, inner = -1/rho
/// and alpha = 2 this is p^2_{rho (g* o -id)}, the conjugate-side potential
/// used by the ADMM envelope.
struct Potential {
  RelaxedProx map;
  double outer = 1.0;
  double inner = 1.0;

  double value(std::span<const double> y) const;
  Vector gradient(std::span<const double> y) const;
};

/// x -> (I - gamma H) x - gamma h
AffineMap gradient_step_map(const QuadraticFn& f, double gamma);

/// R_{gamma f} for quadratic f: P = 2(I + gamma H)^{-1} - I,
/// q = -2 gamma (I + gamma H)^{-1} h.
AffineMap reflected_prox_map_quadratic(const QuadraticFn& f, double gamma);

}  // namespace envkit
