#include "envkit/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace envkit {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_gamma_below_inverse_lmax(double gamma, const QuadraticFn& f, const char* what) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ParameterError(std::string(what) + ": gamma must be > 0 (got " + num(gamma) + ")");
  const double lmax = f.H.lambda_max();
  if (lmax > 0.0 && gamma * lmax >= 1.0)
    throw ParameterError(std::string(what) + ": gamma must lie strictly inside (0, 1/lambda_max(H)) = (0, " +
                         num(1.0 / lmax) + "); got " + num(gamma));
}

void require_psd(const QuadraticFn& f, const char* what) {
  if (f.H.lambda_min() < -f.H.spectral_tolerance())
    throw ParameterError(std::string(what) + ": H must be positive semidefinite (lambda_min = " +
                         num(f.H.lambda_min()) + ")");
}

void require_compatible(const ProxFn& g, std::size_t n, const char* what) {
  if (auto d = g.dim(); d && *d != n)
    throw DimensionError(std::string(what) + ": function dimension " + std::to_string(*d) +
                         " does not match " + std::to_string(n));
}

void require_unit_interval_2(double a, const char* name) {
  if (!(a > 0.0 && a <= 2.0))
    throw ParameterError(std::string("GAP: ") + name + " must lie in (0, 2] (got " + num(a) + ")");
}

GeneralEnvelope build_one(const GeneralSpec& s) {
  return GeneralEnvelope(s.S1, s.f2, s.params, s.scale, EnvelopeKind::General);
}

GeneralEnvelope build_one(const MoreauSpec& s) {
  if (s.dim == 0) throw DimensionError("Moreau: dimension must be >= 1");
  require_compatible(s.f, s.dim, "Moreau");
  RelaxedProx rp(s.f, s.gamma, 1.0);
  return GeneralEnvelope(AffineMap{SymOperator::identity(s.dim), Vector(s.dim, 0.0)}, Potential{rp},
                         AveragedParams(0.5, 1.0), 1.0 / s.gamma, EnvelopeKind::Moreau);
}

GeneralEnvelope build_one(const FbSpec& s) {
  require_psd(s.f, "FB");
  require_gamma_below_inverse_lmax(s.gamma, s.f, "FB");
  require_compatible(s.g, s.f.dim(), "FB");
  return GeneralEnvelope(gradient_step_map(s.f, s.gamma), Potential{RelaxedProx(s.g, s.gamma, 1.0)},
                         AveragedParams(0.5, 1.0), 1.0 / s.gamma, EnvelopeKind::FB);
}

GeneralEnvelope build_one(const DrSpec& s) {
  require_psd(s.f, "DR");
  require_gamma_below_inverse_lmax(s.gamma, s.f, "DR");
  require_compatible(s.g, s.f.dim(), "DR");
  return GeneralEnvelope(reflected_prox_map_quadratic(s.f, s.gamma), Potential{RelaxedProx(s.g, s.gamma, 2.0)},
                         AveragedParams(1.0, 1.0), 0.5 / s.gamma, EnvelopeKind::DR);
}

GeneralEnvelope build_one(const AdmmSpec& s) {
  if (!(s.rho > 0.0) || !std::isfinite(s.rho))
    throw ParameterError("ADMM: rho must be > 0 (got " + num(s.rho) + ")");
  if (s.f.H.lambda_min() <= 1e-12)
    throw ParameterError("ADMM: H must be positive definite (lambda_min = " + num(s.f.H.lambda_min()) + ")");
  require_compatible(s.g, s.f.dim(), "ADMM");
  const double gamma = 1.0 / s.rho;
  // R_{rho f*}(x) = -rho R_{f/rho}(x/rho) = -P_dr x - rho q_dr
  const AffineMap dr = reflected_prox_map_quadratic(s.f, gamma);
  AffineMap S1{-1.0 * dr.P, scaled(-s.rho, dr.q)};
  // p^2_{rho (g* o -id)}(y) = -rho^2 p^2_{g/rho}(-y/rho)
  Potential f2{RelaxedProx(s.g, gamma, 2.0), -s.rho * s.rho, -gamma};
  return GeneralEnvelope(std::move(S1), std::move(f2), AveragedParams(1.0, 1.0), 0.5 / s.rho,
                         EnvelopeKind::ADMM);
}

GeneralEnvelope build_one(const GapSpec& s) {
  require_unit_interval_2(s.alpha1, "alpha1");
  require_unit_interval_2(s.alpha2, "alpha2");
  if (!s.C.is_indicator()) throw ParameterError("GAP: C must be a set indicator (affine, box or halfspace)");
  require_compatible(s.C, s.D.dim(), "GAP");
  AffineMap S1{poly_of_operator(s.D.N, 1.0 - s.alpha1, s.alpha1, 0.0), scaled(s.alpha1, s.D.d)};
  return GeneralEnvelope(std::move(S1), Potential{RelaxedProx(s.C, 1.0, s.alpha2)},
                         AveragedParams(0.5 * s.alpha2, 1.0), 1.0, EnvelopeKind::GAP);
}

void require_delta(double delta, const char* what) {
  if (!(delta >= -1.0 && delta <= 1.0))
    throw ParameterError(std::string(what) + ": delta must lie in [-1, 1] (got " + num(delta) + ")");
}

double closest_to(std::span<const double> eigs, double target) {
  double best = eigs[0];
  for (double l : eigs)
    if (std::abs(l - target) < std::abs(best - target)) best = l;
  return best;
}

}  // namespace

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::General: return "general";
    case EnvelopeKind::Moreau: return "moreau";
    case EnvelopeKind::FB: return "fb";
    case EnvelopeKind::DR: return "dr";
    case EnvelopeKind::ADMM: return "admm";
    case EnvelopeKind::GAP: return "gap";
  }
  return "unknown";
}

EnvelopeKind kind_of(const EnvelopeSpec& spec) {
  constexpr EnvelopeKind kinds[] = {EnvelopeKind::General, EnvelopeKind::Moreau, EnvelopeKind::FB,
                                    EnvelopeKind::DR,      EnvelopeKind::ADMM,   EnvelopeKind::GAP};
  return kinds[spec.index()];
}

GeneralEnvelope::GeneralEnvelope(AffineMap S1, Potential f2, AveragedParams params, double scale,
                                 EnvelopeKind kind)
    : kind_(kind), S1_(std::move(S1)), f2_(std::move(f2)), params_(params), scale_(scale) {
  require_same_size(S1_.P.dim(), S1_.q.size(), "GeneralEnvelope: P and q");
  if (S1_.P.dim() == 0) throw DimensionError("GeneralEnvelope: dimension must be >= 1");
  require_finite(S1_.q, "GeneralEnvelope: q");
  if (!(scale_ > 0.0) || !std::isfinite(scale_))
    throw ParameterError("GeneralEnvelope: scale must be > 0 (got " + num(scale_) + ")");
  if (S1_.P.norm2() > 1.0 + 1e-10)
    throw ParameterError("GeneralEnvelope: P must be nonexpansive (||P||_2 = " + num(S1_.P.norm2()) + ")");
  require_compatible(f2_.map.base, dim(), "GeneralEnvelope");
}

void GeneralEnvelope::check_point(std::span<const double> x) const {
  require_same_size(dim(), x.size(), "GeneralEnvelope: point");
  require_finite(x, "GeneralEnvelope: point");
}

Vector GeneralEnvelope::apply_S1(std::span<const double> x) const {
  check_point(x);
  return S1_.apply(x);
}

Vector GeneralEnvelope::apply_S2(std::span<const double> y) const { return f2_.gradient(y); }

Vector GeneralEnvelope::fixed_point_map(std::span<const double> x) const { return apply_S2(apply_S1(x)); }

GeneralEnvelope::Evaluation GeneralEnvelope::evaluate(std::span<const double> x) const {
  check_point(x);
  const Vector px = S1_.P.apply(x);
  const Vector y = add(px, S1_.q);
  Evaluation e;
  e.mapped = f2_.gradient(y);
  const Vector r = sub(x, e.mapped);
  e.value = scale_ * (0.5 * dot(px, x) - f2_.value(y));
  e.gradient = scaled(scale_, S1_.P.apply(r));
  e.residual = norm(r);
  return e;
}

double GeneralEnvelope::value(std::span<const double> x) const {
  check_point(x);
  const Vector px = S1_.P.apply(x);
  return scale_ * (0.5 * dot(px, x) - f2_.value(add(px, S1_.q)));
}

Vector GeneralEnvelope::gradient(std::span<const double> x) const { return evaluate(x).gradient; }

double GeneralEnvelope::fixed_point_residual(std::span<const double> x) const {
  return norm(sub(x, fixed_point_map(x)));
}

GeneralEnvelope build(const EnvelopeSpec& spec) {
  return std::visit([](const auto& s) { return build_one(s); }, spec);
}

double lambda_min_closed_form(std::span<const double> eigs, double delta) {
  require_delta(delta, "lambda_min_closed_form");
  if (eigs.empty()) throw DimensionError("lambda_min_closed_form: empty spectrum");
  const auto [mi, ma] = std::minmax_element(eigs.begin(), eigs.end());
  const double m = *mi, L = *ma;
  auto psi = [delta](double l) { return l - delta * l * l; };
  if (delta >= 0.0) return std::min(psi(m), psi(L));
  if (delta >= -0.5) return psi(m);
  return psi(closest_to(eigs, 0.5 / delta));
}

double lambda_max_closed_form(std::span<const double> eigs, double delta) {
  require_delta(delta, "lambda_max_closed_form");
  if (eigs.empty()) throw DimensionError("lambda_max_closed_form: empty spectrum");
  const auto [mi, ma] = std::minmax_element(eigs.begin(), eigs.end());
  const double m = *mi, L = *ma;
  auto psi = [delta](double l) { return l + delta * l * l; };
  if (delta >= -0.5) return std::max(psi(m), psi(L));
  return psi(closest_to(eigs, -0.5 / delta));
}

BoundPair bounds(const GeneralEnvelope& env) {
  const auto& P = env.P();
  const double db = env.params().delta_beta();
  const double da = env.params().delta_alpha();
  const double s = env.scale();
  BoundPair out{s * poly_of_operator(P, 0.0, 1.0, -db), s * poly_of_operator(P, 0.0, 1.0, da), 0.0, 0.0};
  out.beta_l = out.M.lambda_min();
  out.beta_u = out.L.lambda_max();

  const double tol = P.spectral_tolerance();
  const auto& eigs = P.spectrum().values;
  const bool in_unit = eigs.front() >= -tol && eigs.back() <= 1.0 + tol;
  if (in_unit && db >= -0.5 && da >= -0.5) {
    const double bl = s * lambda_min_closed_form(eigs, db);
    const double bu = s * lambda_max_closed_form(eigs, da);
    if (std::abs(bl - out.beta_l) > 1e-9 * (1.0 + std::abs(bl)) ||
        std::abs(bu - out.beta_u) > 1e-9 * (1.0 + std::abs(bu)))
      throw NumericalError("bounds: eigenvalue closed forms disagree with the bound operators (beta_l " +
                           num(out.beta_l) + " vs " + num(bl) + ", beta_u " + num(out.beta_u) + " vs " +
                           num(bu) + ")");
  }
  return out;
}

GapBoundEigenvalues gap_bound_eigenvalues(double alpha1, double alpha2) {
  require_unit_interval_2(alpha1, "alpha1");
  require_unit_interval_2(alpha2, "alpha2");
  const double c = 1.0 - alpha1;
  return {alpha1 * c, 0.0, c * (1.0 + (alpha2 - 1.0) * c), alpha2};
}

ValueAndGradient general_envelope_value_nonaffine(const SmoothFunction& f1, const Potential& f2,
                                                  std::span<const double> x) {
  require_finite(x, "general_envelope_value_nonaffine");
  const Vector y = f1.gradient(x);
  require_same_size(x.size(), y.size(), "general_envelope_value_nonaffine: gradient of f1");
  ValueAndGradient out;
  out.value = dot(y, x) - f1.value(x) - f2.value(y);
  out.gradient = f1.hessian(x).apply(sub(x, f2.gradient(y)));
  return out;
}

}  // namespace envkit
