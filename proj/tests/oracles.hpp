#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's spectral or proximal code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Minimizer of a unimodal-on-grid scalar function: coarse grid, then
/// repeated refinement around the best node.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, int refinements = 40) {
  double best = lo;
  for (int r = 0; r < refinements; ++r) {
    const int steps = 200;
    const double h = (hi - lo) / steps;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
      const double x = lo + i * h;
      const double v = f(x);
      if (v < fbest) {
        fbest = v;
        best = x;
      }
    }
    lo = best - 2.0 * h;
    hi = best + 2.0 * h;
  }
  return best;
}

inline double grid_min(const std::function<double(double)>& f, double lo, double hi) {
  return f(grid_argmin(f, lo, hi));
}

inline double grid_sup(const std::function<double(double)>& f, double lo, double hi) {
  return -grid_min([&](double x) { return -f(x); }, lo, hi);
}

/// min / max of psi(l) = l + c l^2 over a list of eigenvalues.
inline double psi_min(const std::vector<double>& eigs, double c) {
  double m = std::numeric_limits<double>::infinity();
  for (double l : eigs) m = std::min(m, l + c * l * l);
  return m;
}
inline double psi_max(const std::vector<double>& eigs, double c) {
  double m = -std::numeric_limits<double>::infinity();
  for (double l : eigs) m = std::max(m, l + c * l * l);
  return m;
}

/// Eigenvalues of a symmetric 2x2 matrix [[a, b], [b, d]], ascending.
inline std::vector<double> eig2(double a, double b, double d) {
  const double m = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  return {m - r, m + r};
}

inline std::vector<double> matvec(const std::vector<double>& A, std::size_t n, const std::vector<double>& x) {
  std::vector<double> y(A.size() / n, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += A[i * n + j] * x[j];
  return y;
}

inline double soft_threshold(double z, double w) { return std::copysign(std::max(std::abs(z) - w, 0.0), z); }

}  // namespace oracle
