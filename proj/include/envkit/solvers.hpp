#pragma once

#include <cstdint>
#include <vector>

#include "envkit/envelopes.hpp"

namespace envkit {

enum class SolverMethod { Averaged, ScaledGradient, GradientDescent };

std::string to_string(SolverMethod m);

struct SolverConfig {
  /// Relaxation of the averaged and scaled-gradient iterations, in (0, 1).
  double alpha = 0.5;
  /// Fixed gradient-descent step; 0 selects 1/beta_u, or backtracking when
  /// beta_u <= 0.
  double step = 0.0;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_iter = 1000;
  /// Fixed-point residual (operator methods) or gradient norm (descent).
  double tol = 1e-10;
  std::uint64_t seed = 0;
  /// Keep every iterate in Trace::iterates.
  bool record_iterates = false;

  void validate() const;
};

enum class SolverStatus { Converged, MaxIter };

struct TraceRecord {
  int k = 0;
  double F = 0.0;
  double grad_norm = 0.0;
  double fp_residual = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  SolverStatus status = SolverStatus::MaxIter;
  std::vector<Vector> iterates;
};

struct SolveResult {
  Vector x;
  Trace trace;
};

/// x+ = (1 - alpha) x + alpha S2 S1 x until ||x - S2 S1 x|| <= tol.
SolveResult averaged_iteration(const GeneralEnvelope& env, std::span<const double> x0, const SolverConfig& cfg);

/// x+ = x - alpha (scale P)^{-1} grad F(x); same iterates as the averaged
/// iteration. Requires sigma_min(P) > 1e-8.
SolveResult scaled_gradient_iteration(const GeneralEnvelope& env, std::span<const double> x0,
                                      const SolverConfig& cfg);

/// x+ = x - t grad F(x) until ||grad F|| <= tol.
SolveResult gradient_descent(const GeneralEnvelope& env, std::span<const double> x0, const SolverConfig& cfg);

SolveResult solve(SolverMethod method, const GeneralEnvelope& env, std::span<const double> x0,
                  const SolverConfig& cfg);

/// Maps a stationary point of the envelope to a solution of the underlying
/// problem: prox_{gamma f} for DR, prox_{f/rho}(x/rho) for ADMM, Pi_D for GAP
/// with alpha1 = alpha2 = 2, identity otherwise.
Vector solution_extract(const EnvelopeSpec& spec, std::span<const double> x);

}  // namespace envkit
