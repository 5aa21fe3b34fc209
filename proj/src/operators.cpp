#include "envkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace envkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive_gamma(double gamma, const char* what) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ParameterError(std::string(what) + ": gamma must be > 0 (got " + std::to_string(gamma) + ")");
}

void check_size(std::optional<std::size_t> expected, std::size_t got, const char* what) {
  if (expected) require_same_size(*expected, got, what);
}

// V diag(phi(lambda)) V^T for the spectrum of H.
template <class Fn>
SymOperator spectral_map(const SymOperator& H, Fn phi) {
  const auto& s = H.spectrum();
  Vector mapped(s.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = phi(s.values[k]);
  return SymOperator::from_spectrum(s.vectors, mapped);
}

}  // namespace

// ---------------------------------------------------------------------------
// ProxFn

ProxFn ProxFn::quadratic(QuadraticFn f) {
  if (f.H.lambda_min() < -f.H.spectral_tolerance())
    throw ParameterError("ProxFn::quadratic: H must be positive semidefinite (lambda_min = " +
                         std::to_string(f.H.lambda_min()) + ")");
  return ProxFn(prox_fn::Quadratic{std::move(f)});
}

ProxFn ProxFn::indicator_affine(AffineSet set) { return ProxFn(prox_fn::IndicatorAffine{std::move(set)}); }

ProxFn ProxFn::indicator_box(Vector lo, Vector hi) {
  require_same_size(lo.size(), hi.size(), "ProxFn::indicator_box");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]))
      throw ParameterError("ProxFn::indicator_box: NaN bound");
    if (lo[i] > hi[i] || lo[i] == kInf || hi[i] == -kInf)
      throw ParameterError("ProxFn::indicator_box: empty box at coordinate " + std::to_string(i));
  }
  return ProxFn(prox_fn::IndicatorBox{std::move(lo), std::move(hi)});
}

ProxFn ProxFn::indicator_halfspace(Vector a, double beta) {
  require_finite(a, "ProxFn::indicator_halfspace");
  if (norm(a) == 0.0) throw ParameterError("ProxFn::indicator_halfspace: normal vector is zero");
  if (!std::isfinite(beta)) throw ParameterError("ProxFn::indicator_halfspace: beta must be finite");
  return ProxFn(prox_fn::IndicatorHalfspace{std::move(a), beta});
}

ProxFn ProxFn::l1(double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw ParameterError("ProxFn::l1: weight must be >= 0 (got " + std::to_string(weight) + ")");
  return ProxFn(prox_fn::L1{weight});
}

ProxFn ProxFn::zero() { return ProxFn(prox_fn::Zero{}); }

std::string ProxFn::name() const {
  return std::visit(overloaded{
                        [](const prox_fn::Quadratic&) { return std::string("quadratic"); },
                        [](const prox_fn::IndicatorAffine&) { return std::string("affine"); },
                        [](const prox_fn::IndicatorBox&) { return std::string("box"); },
                        [](const prox_fn::IndicatorHalfspace&) { return std::string("halfspace"); },
                        [](const prox_fn::L1&) { return std::string("l1"); },
                        [](const prox_fn::Zero&) { return std::string("zero"); },
                    },
                    v_);
}

bool ProxFn::is_indicator() const {
  return std::holds_alternative<prox_fn::IndicatorAffine>(v_) ||
         std::holds_alternative<prox_fn::IndicatorBox>(v_) ||
         std::holds_alternative<prox_fn::IndicatorHalfspace>(v_);
}

std::optional<std::size_t> ProxFn::dim() const {
  return std::visit(overloaded{
                        [](const prox_fn::Quadratic& q) -> std::optional<std::size_t> { return q.f.dim(); },
                        [](const prox_fn::IndicatorAffine& a) -> std::optional<std::size_t> { return a.set.dim(); },
                        [](const prox_fn::IndicatorBox& b) -> std::optional<std::size_t> { return b.lo.size(); },
                        [](const prox_fn::IndicatorHalfspace& h) -> std::optional<std::size_t> { return h.a.size(); },
                        [](const prox_fn::L1&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const prox_fn::Zero&) -> std::optional<std::size_t> { return std::nullopt; },
                    },
                    v_);
}

double ProxFn::value(std::span<const double> x, double feas_tol) const {
  check_size(dim(), x.size(), "ProxFn::value");
  return std::visit(
      overloaded{
          [&](const prox_fn::Quadratic& q) { return q.f.value(x); },
          [&](const prox_fn::IndicatorAffine& a) { return a.set.residual(x) <= feas_tol ? 0.0 : kInf; },
          [&](const prox_fn::IndicatorBox& b) {
            for (std::size_t i = 0; i < x.size(); ++i)
              if (x[i] < b.lo[i] - feas_tol || x[i] > b.hi[i] + feas_tol) return kInf;
            return 0.0;
          },
          [&](const prox_fn::IndicatorHalfspace& h) { return dot(h.a, x) <= h.beta + feas_tol ? 0.0 : kInf; },
          [&](const prox_fn::L1& l) {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return l.weight * s;
          },
          [&](const prox_fn::Zero&) { return 0.0; },
      },
      v_);
}

Vector prox(const ProxFn& g, double gamma, std::span<const double> z) {
  require_positive_gamma(gamma, "prox");
  check_size(g.dim(), z.size(), "prox");
  require_finite(z, "prox");
  return std::visit(
      overloaded{
          [&](const prox_fn::Quadratic& q) {
            // (I + gamma H)^{-1} (z - gamma h)
            const auto& s = q.f.H.spectrum();
            Vector rhs = combine(1.0, z, -gamma, q.f.h);
            Vector coeff = s.vectors.transposed() * rhs;
            for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] /= 1.0 + gamma * s.values[k];
            return s.vectors * coeff;
          },
          // Projection does not depend on gamma.
          [&](const prox_fn::IndicatorAffine& a) { return a.set.project(z); },
          [&](const prox_fn::IndicatorBox& b) {
            Vector out(z.begin(), z.end());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], b.lo[i], b.hi[i]);
            return out;
          },
          [&](const prox_fn::IndicatorHalfspace& h) {
            Vector out(z.begin(), z.end());
            const double excess = dot(h.a, z) - h.beta;
            if (excess > 0.0) {
              const double step = excess / dot(h.a, h.a);
              for (std::size_t i = 0; i < out.size(); ++i) out[i] -= step * h.a[i];
            }
            return out;
          },
          [&](const prox_fn::L1& l) {
            const double t = gamma * l.weight;
            Vector out(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
              const double m = std::abs(z[i]) - t;
              out[i] = m > 0.0 ? std::copysign(m, z[i]) : 0.0;
            }
            return out;
          },
          [&](const prox_fn::Zero&) { return Vector(z.begin(), z.end()); },
      },
      g.variant());
}

double reg_conjugate_value(const ProxFn& g, double gamma, std::span<const double> y) {
  const Vector u = prox(g, gamma, y);
  // Indicators vanish at their own projection.
  const double gu = g.is_indicator() ? 0.0 : g.value(u);
  return dot(y, u) - gamma * gu - 0.5 * dot(u, u);
}

std::optional<ProxFn> conjugate(const ProxFn& g, std::size_t n) {
  check_size(g.dim(), n, "conjugate");
  return std::visit(
      overloaded{
          [&](const prox_fn::Quadratic& q) -> std::optional<ProxFn> {
            if (q.f.H.lambda_min() <= 1e-12) return std::nullopt;
            return ProxFn::quadratic(quadratic_conjugate(q.f));
          },
          [&](const prox_fn::IndicatorAffine&) -> std::optional<ProxFn> { return std::nullopt; },
          [&](const prox_fn::IndicatorBox& b) -> std::optional<ProxFn> {
            const bool whole_space = std::all_of(b.lo.begin(), b.lo.end(), [](double v) { return v == -kInf; }) &&
                                     std::all_of(b.hi.begin(), b.hi.end(), [](double v) { return v == kInf; });
            if (whole_space) return ProxFn::indicator_box(Vector(n, 0.0), Vector(n, 0.0));
            if (n == 0) return std::nullopt;
            const double w = b.hi[0];
            for (std::size_t i = 0; i < n; ++i)
              if (b.hi[i] != w || b.lo[i] != -w) return std::nullopt;
            if (!std::isfinite(w)) return std::nullopt;
            return w == 0.0 ? ProxFn::zero() : ProxFn::l1(w);
          },
          [&](const prox_fn::IndicatorHalfspace&) -> std::optional<ProxFn> { return std::nullopt; },
          [&](const prox_fn::L1& l) -> std::optional<ProxFn> {
            return ProxFn::indicator_box(Vector(n, -l.weight), Vector(n, l.weight));
          },
          [&](const prox_fn::Zero&) -> std::optional<ProxFn> {
            return ProxFn::indicator_box(Vector(n, 0.0), Vector(n, 0.0));
          },
      },
      g.variant());
}

ProxFn negated_argument(const ProxFn& g) {
  return std::visit(
      overloaded{
          [](const prox_fn::Quadratic& q) {
            return ProxFn::quadratic(QuadraticFn(q.f.H, scaled(-1.0, q.f.h), q.f.c));
          },
          [](const prox_fn::IndicatorAffine& a) {
            return ProxFn::indicator_affine(
                AffineSet{a.set.A, scaled(-1.0, a.set.b), a.set.N, scaled(-1.0, a.set.d)});
          },
          [](const prox_fn::IndicatorBox& b) {
            return ProxFn::indicator_box(scaled(-1.0, b.hi), scaled(-1.0, b.lo));
          },
          [](const prox_fn::IndicatorHalfspace& h) {
            return ProxFn::indicator_halfspace(scaled(-1.0, h.a), h.beta);
          },
          [](const prox_fn::L1& l) { return ProxFn::l1(l.weight); },
          [](const prox_fn::Zero&) { return ProxFn::zero(); },
      },
      g.variant());
}

// ---------------------------------------------------------------------------
// Averagedness

AveragedParams::AveragedParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("AveragedParams: alpha must lie in (0, 1] (got " + std::to_string(alpha) + ")");
  if (!(beta > 0.0 && beta <= 1.0))
    throw ParameterError("AveragedParams: beta must lie in (0, 1] (got " + std::to_string(beta) + ")");
}

AveragedParams classify_gradient_operator(GradientKind kind, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw ParameterError("classify_gradient_operator: delta must lie in [0, 1] (got " +
                         std::to_string(delta) + ")");
  const double half_up = 0.5 * (delta + 1.0);
  return kind == GradientKind::Lipschitz ? AveragedParams(half_up, half_up)
                                         : AveragedParams(0.5, half_up);
}

// ---------------------------------------------------------------------------
// Relaxed prox

RelaxedProx::RelaxedProx(ProxFn base_, double gamma_, double relaxation_)
    : base(std::move(base_)), gamma(gamma_), relaxation(relaxation_) {
  require_positive_gamma(gamma, "RelaxedProx");
  if (!(relaxation > 0.0 && relaxation <= 2.0))
    throw ParameterError("RelaxedProx: relaxation must lie in (0, 2] (got " +
                         std::to_string(relaxation) + ")");
}

Vector relaxed_prox_apply(const RelaxedProx& rp, std::span<const double> x) {
  return combine(rp.relaxation, prox(rp.base, rp.gamma, x), 1.0 - rp.relaxation, x);
}

double relaxed_prox_potential(const RelaxedProx& rp, std::span<const double> x) {
  return rp.relaxation * reg_conjugate_value(rp.base, rp.gamma, x) +
         0.5 * (1.0 - rp.relaxation) * dot(x, x);
}

double Potential::value(std::span<const double> y) const {
  if (inner == 1.0) return outer * relaxed_prox_potential(map, y);
  return outer * relaxed_prox_potential(map, scaled(inner, y));
}

Vector Potential::gradient(std::span<const double> y) const {
  if (inner == 1.0 && outer == 1.0) return relaxed_prox_apply(map, y);
  return scaled(outer * inner, relaxed_prox_apply(map, scaled(inner, y)));
}

// ---------------------------------------------------------------------------
// Affine operator constructions

AffineMap gradient_step_map(const QuadraticFn& f, double gamma) {
  require_positive_gamma(gamma, "gradient_step_map");
  return AffineMap{poly_of_operator(f.H, 1.0, -gamma, 0.0), scaled(-gamma, f.h)};
}

AffineMap reflected_prox_map_quadratic(const QuadraticFn& f, double gamma) {
  require_positive_gamma(gamma, "reflected_prox_map_quadratic");
  if (f.H.lambda_min() < -f.H.spectral_tolerance())
    throw ParameterError("reflected_prox_map_quadratic: H must be positive semidefinite");
  SymOperator p = spectral_map(f.H, [gamma](double l) { return (1.0 - gamma * l) / (1.0 + gamma * l); });
  SymOperator resolvent = spectral_map(f.H, [gamma](double l) { return 1.0 / (1.0 + gamma * l); });
  return AffineMap{std::move(p), scaled(-2.0 * gamma, resolvent.apply(f.h))};
}

}  // namespace envkit
