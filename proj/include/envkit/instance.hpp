#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "envkit/envelopes.hpp"
#include "envkit/solvers.hpp"

namespace envkit {

/// Instance-file failure, tagged by category.
class InstanceError : public std::runtime_error {
 public:
  enum class Category { Malformed, DimensionMismatch, ParameterRange };

  InstanceError(Category c, const std::string& what) : std::runtime_error(what), category_(c) {}
  Category category() const { return category_; }
  /// "malformed instance", "dimension mismatch" or "parameter out of range".
  std::string category_name() const;

 private:
  Category category_;
};

/// Serializable description of a proximable function or set.
/// type: quadratic | l1 | zero | box | halfspace | affine.
struct FunctionDesc {
  std::string type;
  Vector H;  // quadratic, n x n row-major
  Vector h;
  double c = 0.0;
  double weight = 0.0;  // l1
  Vector lo, hi;        // box; infinite bounds allowed
  Vector a;             // halfspace <a, x> <= beta
  double beta = 0.0;
  Vector A;  // affine {x | A x = b}, rows = b.size(), row-major
  Vector b;

  bool operator==(const FunctionDesc&) const = default;
};

struct QuadraticDesc {
  Vector H;
  Vector h;
  bool operator==(const QuadraticDesc&) const = default;
};

struct AffineDesc {
  Vector A;
  Vector b;
  bool operator==(const AffineDesc&) const = default;
};

struct SolverDesc {
  SolverMethod method = SolverMethod::Averaged;
  double alpha = 0.5;
  double tol = 1e-10;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  double step = 0.0;
  bool operator==(const SolverDesc&) const = default;
};

/// In-memory form of an instance file; plain data.
struct Instance {
  EnvelopeKind kind = EnvelopeKind::Moreau;
  double gamma = 0.0;
  double rho = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::optional<FunctionDesc> f_prox;  // moreau
  std::optional<QuadraticDesc> f;      // fb, dr, admm
  std::optional<FunctionDesc> g;       // fb, dr, admm
  std::optional<FunctionDesc> C;       // gap
  std::optional<AffineDesc> D;         // gap
  Vector x0;
  SolverDesc solver;

  std::size_t dim() const { return x0.size(); }
  bool operator==(const Instance&) const = default;
};

/// Parses and validates an instance document. `max_n` caps the dimension.
Instance parse_instance(const std::string& text, std::size_t max_n = 500);
Instance load_instance(const std::string& path, std::size_t max_n = 500);

/// Normalized JSON document: every field explicit, matrices flat row-major,
/// infinite box bounds as null.
std::string dump_instance(const Instance& inst);

ProxFn to_prox_fn(const FunctionDesc& d, std::size_t n);
EnvelopeSpec to_spec(const Instance& inst);
SolverConfig to_solver_config(const SolverDesc& s);

}  // namespace envkit
