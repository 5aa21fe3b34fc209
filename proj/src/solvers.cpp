#include "envkit/solvers.hpp"

#include "envkit/format.hpp"

#include <cmath>

namespace envkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kMaxBacktracks = 60;

class Recorder {
 public:
  Recorder(const SolverConfig& cfg, Trace& trace) : cfg_(cfg), trace_(trace) {}

  void add(int k, std::span<const double> x, const GeneralEnvelope::Evaluation& e) {
    trace_.records.push_back({k, e.value, norm(e.gradient), e.residual});
    if (cfg_.record_iterates) trace_.iterates.emplace_back(x.begin(), x.end());
  }

 private:
  const SolverConfig& cfg_;
  Trace& trace_;
};

template <class Step>
SolveResult run_fixed_point(const GeneralEnvelope& env, std::span<const double> x0, const SolverConfig& cfg,
                            Step step) {
  cfg.validate();
  SolveResult out{Vector(x0.begin(), x0.end()), {}};
  Recorder rec(cfg, out.trace);
  for (int k = 0;; ++k) {
    const auto e = env.evaluate(out.x);
    rec.add(k, out.x, e);
    if (e.residual <= cfg.tol) {
      out.trace.status = SolverStatus::Converged;
      break;
    }
    if (k == cfg.max_iter) break;
    out.x = step(out.x, e);
  }
  return out;
}

}  // namespace

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Averaged: return "averaged";
    case SolverMethod::ScaledGradient: return "scaled_gradient";
    case SolverMethod::GradientDescent: return "gradient_descent";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("solver: alpha must lie in (0, 1) (got " + format_double(alpha) + ")");
  if (!(tol > 0.0)) throw ParameterError("solver: tol must be > 0");
  if (max_iter < 1) throw ParameterError("solver: max_iter must be >= 1");
  if (!(step >= 0.0) || !std::isfinite(step)) throw ParameterError("solver: step must be >= 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ParameterError("solver: armijo constant must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ParameterError("solver: shrink factor must lie in (0, 1)");
}

SolveResult averaged_iteration(const GeneralEnvelope& env, std::span<const double> x0, const SolverConfig& cfg) {
  return run_fixed_point(env, x0, cfg, [&](const Vector& x, const GeneralEnvelope::Evaluation& e) {
    return combine(1.0 - cfg.alpha, x, cfg.alpha, e.mapped);
  });
}

SolveResult scaled_gradient_iteration(const GeneralEnvelope& env, std::span<const double> x0,
                                      const SolverConfig& cfg) {
  if (env.P().sigma_min() <= 1e-8)
    throw ParameterError("scaled_gradient_iteration: P is singular (sigma_min = " +
                         format_double(env.P().sigma_min()) + ")");
  const double c = cfg.alpha / env.scale();
  return run_fixed_point(env, x0, cfg, [&](const Vector& x, const GeneralEnvelope::Evaluation& e) {
    return combine(1.0, x, -c, env.P().solve(e.gradient));
  });
}

SolveResult gradient_descent(const GeneralEnvelope& env, std::span<const double> x0, const SolverConfig& cfg) {
  cfg.validate();
  double fixed_step = cfg.step;
  if (fixed_step == 0.0) {
    const double beta_u = bounds(env).beta_u;
    if (beta_u > 0.0) fixed_step = 1.0 / beta_u;
  }

  SolveResult out{Vector(x0.begin(), x0.end()), {}};
  Recorder rec(cfg, out.trace);
  for (int k = 0;; ++k) {
    const auto e = env.evaluate(out.x);
    rec.add(k, out.x, e);
    const double gn = norm(e.gradient);
    if (gn <= cfg.tol) {
      out.trace.status = SolverStatus::Converged;
      break;
    }
    if (k == cfg.max_iter) break;
    if (fixed_step > 0.0) {
      out.x = combine(1.0, out.x, -fixed_step, e.gradient);
      continue;
    }
    // Armijo backtracking from a unit step.
    double t = 1.0;
    Vector trial = combine(1.0, out.x, -t, e.gradient);
    for (int b = 0; b < kMaxBacktracks && env.value(trial) > e.value - cfg.armijo_c * t * gn * gn; ++b) {
      t *= cfg.shrink;
      trial = combine(1.0, out.x, -t, e.gradient);
    }
    out.x = std::move(trial);
  }
  return out;
}

SolveResult solve(SolverMethod method, const GeneralEnvelope& env, std::span<const double> x0,
                  const SolverConfig& cfg) {
  switch (method) {
    case SolverMethod::Averaged: return averaged_iteration(env, x0, cfg);
    case SolverMethod::ScaledGradient: return scaled_gradient_iteration(env, x0, cfg);
    case SolverMethod::GradientDescent: return gradient_descent(env, x0, cfg);
  }
  throw ParameterError("solve: unknown method");
}

Vector solution_extract(const EnvelopeSpec& spec, std::span<const double> x) {
  return std::visit(
      overloaded{
          [&](const DrSpec& s) { return prox(ProxFn::quadratic(s.f), s.gamma, x); },
          [&](const AdmmSpec& s) { return prox(ProxFn::quadratic(s.f), 1.0 / s.rho, scaled(1.0 / s.rho, x)); },
          [&](const GapSpec& s) {
            if (s.alpha1 == 2.0 && s.alpha2 == 2.0) return s.D.project(x);
            return Vector(x.begin(), x.end());
          },
          [&](const auto&) { return Vector(x.begin(), x.end()); },
      },
      spec);
}

}  // namespace envkit
