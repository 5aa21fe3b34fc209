#include "envkit/instance.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace envkit {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void malformed(const std::string& msg) {
  throw InstanceError(InstanceError::Category::Malformed, msg);
}
[[noreturn]] void dimension(const std::string& msg) {
  throw InstanceError(InstanceError::Category::DimensionMismatch, msg);
}
[[noreturn]] void range(const std::string& msg) {
  throw InstanceError(InstanceError::Category::ParameterRange, msg);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) malformed(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) malformed(where + ": unknown field '" + k + "'");
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) malformed(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) malformed(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) malformed(what + " must be finite");
  return d;
}

/// Array of numbers; `null_as` (if set) substitutes null entries.
Vector numbers(const json& v, const std::string& what, std::optional<double> null_as = std::nullopt) {
  if (!v.is_array()) malformed(what + " must be an array of numbers");
  Vector out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (e.is_null() && null_as) {
      out.push_back(*null_as);
      continue;
    }
    out.push_back(number(e, what + " entry"));
  }
  return out;
}

/// Flat row-major array or array of rows.
Vector matrix(const json& v, const std::string& what, std::size_t cols) {
  if (!v.is_array()) malformed(what + " must be an array");
  if (!v.empty() && v.front().is_array()) {
    Vector out;
    for (const auto& row : v) {
      Vector r = numbers(row, what + " row");
      if (r.size() != cols)
        dimension(what + ": row has " + std::to_string(r.size()) + " entries, expected " + std::to_string(cols));
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  return numbers(v, what);
}

void expect_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want)
    dimension(what + " has " + std::to_string(got) + " entries, expected " + std::to_string(want));
}

FunctionDesc parse_function(const json& j, const std::string& where, std::size_t n) {
  const auto& t = require(j, "type", where);
  if (!t.is_string()) malformed(where + ".type must be a string");
  FunctionDesc d;
  d.type = t.get<std::string>();
  if (d.type == "quadratic") {
    only_keys(j, where, {"type", "H", "h", "c"});
    d.H = matrix(require(j, "H", where), where + ".H", n);
    expect_size(d.H.size(), n * n, where + ".H");
    d.h = j.contains("h") ? numbers(j["h"], where + ".h") : Vector(n, 0.0);
    expect_size(d.h.size(), n, where + ".h");
    if (j.contains("c")) d.c = number(j["c"], where + ".c");
  } else if (d.type == "l1") {
    only_keys(j, where, {"type", "weight"});
    d.weight = j.contains("weight") ? number(j["weight"], where + ".weight") : 1.0;
  } else if (d.type == "zero") {
    only_keys(j, where, {"type"});
  } else if (d.type == "box") {
    only_keys(j, where, {"type", "lo", "hi"});
    d.lo = j.contains("lo") ? numbers(j["lo"], where + ".lo", -kInf) : Vector(n, -kInf);
    d.hi = j.contains("hi") ? numbers(j["hi"], where + ".hi", kInf) : Vector(n, kInf);
    expect_size(d.lo.size(), n, where + ".lo");
    expect_size(d.hi.size(), n, where + ".hi");
  } else if (d.type == "halfspace") {
    only_keys(j, where, {"type", "a", "beta"});
    d.a = numbers(require(j, "a", where), where + ".a");
    expect_size(d.a.size(), n, where + ".a");
    d.beta = number(require(j, "beta", where), where + ".beta");
  } else if (d.type == "affine") {
    only_keys(j, where, {"type", "A", "b"});
    d.b = numbers(require(j, "b", where), where + ".b");
    d.A = matrix(require(j, "A", where), where + ".A", n);
    expect_size(d.A.size(), d.b.size() * n, where + ".A");
  } else {
    malformed(where + ".type '" + d.type + "' is not one of quadratic, l1, zero, box, halfspace, affine");
  }
  return d;
}

EnvelopeKind parse_kind(const json& j) {
  if (!j.is_string()) malformed("kind must be a string");
  const auto s = j.get<std::string>();
  for (auto k : {EnvelopeKind::Moreau, EnvelopeKind::FB, EnvelopeKind::DR, EnvelopeKind::ADMM, EnvelopeKind::GAP})
    if (to_string(k) == s) return k;
  malformed("kind '" + s + "' is not one of moreau, fb, dr, admm, gap");
}

SolverMethod parse_method(const json& j) {
  if (!j.is_string()) malformed("solver.method must be a string");
  const auto s = j.get<std::string>();
  for (auto m : {SolverMethod::Averaged, SolverMethod::ScaledGradient, SolverMethod::GradientDescent})
    if (to_string(m) == s) return m;
  malformed("solver.method '" + s + "' is not one of averaged, scaled_gradient, gradient_descent");
}

SolverDesc parse_solver(const json& j) {
  only_keys(j, "solver", {"method", "alpha", "tol", "max_iter", "seed", "step"});
  SolverDesc s;
  if (j.contains("method")) s.method = parse_method(j["method"]);
  if (j.contains("alpha")) s.alpha = number(j["alpha"], "solver.alpha");
  if (j.contains("tol")) s.tol = number(j["tol"], "solver.tol");
  if (j.contains("step")) s.step = number(j["step"], "solver.step");
  if (j.contains("max_iter")) {
    if (!j["max_iter"].is_number_integer()) malformed("solver.max_iter must be an integer");
    const auto v = j["max_iter"].get<long long>();
    if (v < 1 || v > 100000000) range("solver.max_iter must lie in [1, 1e8]");
    s.max_iter = static_cast<int>(v);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) malformed("solver.seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

double parameter(const json& params, const char* key) {
  return number(require(params, key, "parameters"), std::string("parameters.") + key);
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (double x : v) {
    if (std::isinf(x))
      a.push_back(nullptr);
    else
      a.push_back(x);
  }
  return a;
}

json function_json(const FunctionDesc& d) {
  json j;
  j["type"] = d.type;
  if (d.type == "quadratic") {
    j["H"] = vector_json(d.H);
    j["h"] = vector_json(d.h);
    j["c"] = d.c;
  } else if (d.type == "l1") {
    j["weight"] = d.weight;
  } else if (d.type == "box") {
    j["lo"] = vector_json(d.lo);
    j["hi"] = vector_json(d.hi);
  } else if (d.type == "halfspace") {
    j["a"] = vector_json(d.a);
    j["beta"] = d.beta;
  } else if (d.type == "affine") {
    j["A"] = vector_json(d.A);
    j["b"] = vector_json(d.b);
  }
  return j;
}

QuadraticFn to_quadratic(const Vector& H, const Vector& h, double c, std::size_t n) {
  return QuadraticFn(SymOperator(Matrix(n, n, H)), h, c);
}

}  // namespace

std::string InstanceError::category_name() const {
  switch (category_) {
    case Category::Malformed: return "malformed instance";
    case Category::DimensionMismatch: return "dimension mismatch";
    case Category::ParameterRange: return "parameter out of range";
  }
  return "instance error";
}

ProxFn to_prox_fn(const FunctionDesc& d, std::size_t n) {
  if (d.type == "quadratic") return ProxFn::quadratic(to_quadratic(d.H, d.h, d.c, n));
  if (d.type == "l1") return ProxFn::l1(d.weight);
  if (d.type == "zero") return ProxFn::zero();
  if (d.type == "box") return ProxFn::indicator_box(d.lo, d.hi);
  if (d.type == "halfspace") return ProxFn::indicator_halfspace(d.a, d.beta);
  if (d.type == "affine") return ProxFn::indicator_affine(affine_projector(Matrix(d.b.size(), n, d.A), d.b));
  throw ParameterError("unknown function type '" + d.type + "'");
}

EnvelopeSpec to_spec(const Instance& inst) {
  const std::size_t n = inst.dim();
  switch (inst.kind) {
    case EnvelopeKind::Moreau: return MoreauSpec{inst.gamma, to_prox_fn(*inst.f_prox, n), n};
    case EnvelopeKind::FB:
      return FbSpec{inst.gamma, to_quadratic(inst.f->H, inst.f->h, 0.0, n), to_prox_fn(*inst.g, n)};
    case EnvelopeKind::DR:
      return DrSpec{inst.gamma, to_quadratic(inst.f->H, inst.f->h, 0.0, n), to_prox_fn(*inst.g, n)};
    case EnvelopeKind::ADMM:
      return AdmmSpec{inst.rho, to_quadratic(inst.f->H, inst.f->h, 0.0, n), to_prox_fn(*inst.g, n)};
    case EnvelopeKind::GAP:
      return GapSpec{inst.alpha1, inst.alpha2, to_prox_fn(*inst.C, n),
                     affine_projector(Matrix(inst.D->b.size(), n, inst.D->A), inst.D->b)};
    case EnvelopeKind::General: break;
  }
  throw ParameterError("instance kind not supported");
}

SolverConfig to_solver_config(const SolverDesc& s) {
  SolverConfig cfg;
  cfg.alpha = s.alpha;
  cfg.tol = s.tol;
  cfg.max_iter = s.max_iter;
  cfg.seed = s.seed;
  cfg.step = s.step;
  return cfg;
}

Instance parse_instance(const std::string& text, std::size_t max_n) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  only_keys(j, "instance", {"kind", "parameters", "f", "g", "C", "D", "x0", "solver"});

  Instance inst;
  inst.kind = parse_kind(require(j, "kind", "instance"));
  inst.x0 = numbers(require(j, "x0", "instance"), "x0");
  const std::size_t n = inst.x0.size();
  if (n == 0) dimension("x0 must have at least one entry");
  if (n > max_n)
    range("dimension " + std::to_string(n) + " exceeds ENVKIT_MAX_N = " + std::to_string(max_n));

  const json& params = require(j, "parameters", "instance");
  switch (inst.kind) {
    case EnvelopeKind::Moreau:
      only_keys(params, "parameters", {"gamma"});
      only_keys(j, "instance", {"kind", "parameters", "f", "x0", "solver"});
      inst.gamma = parameter(params, "gamma");
      inst.f_prox = parse_function(require(j, "f", "instance"), "f", n);
      break;
    case EnvelopeKind::FB:
    case EnvelopeKind::DR:
    case EnvelopeKind::ADMM: {
      const char* key = inst.kind == EnvelopeKind::ADMM ? "rho" : "gamma";
      only_keys(params, "parameters", {key});
      only_keys(j, "instance", {"kind", "parameters", "f", "g", "x0", "solver"});
      (inst.kind == EnvelopeKind::ADMM ? inst.rho : inst.gamma) = parameter(params, key);
      const json& f = require(j, "f", "instance");
      only_keys(f, "f", {"H", "h"});
      QuadraticDesc q;
      q.H = matrix(require(f, "H", "f"), "f.H", n);
      expect_size(q.H.size(), n * n, "f.H");
      q.h = f.contains("h") ? numbers(f["h"], "f.h") : Vector(n, 0.0);
      expect_size(q.h.size(), n, "f.h");
      inst.f = std::move(q);
      inst.g = parse_function(require(j, "g", "instance"), "g", n);
      break;
    }
    case EnvelopeKind::GAP: {
      only_keys(params, "parameters", {"alpha1", "alpha2"});
      only_keys(j, "instance", {"kind", "parameters", "C", "D", "x0", "solver"});
      inst.alpha1 = parameter(params, "alpha1");
      inst.alpha2 = parameter(params, "alpha2");
      inst.C = parse_function(require(j, "C", "instance"), "C", n);
      if (inst.C->type != "box" && inst.C->type != "halfspace" && inst.C->type != "affine")
        malformed("C.type must be a set: box, halfspace or affine");
      const json& D = require(j, "D", "instance");
      only_keys(D, "D", {"A", "b"});
      AffineDesc a;
      a.b = numbers(require(D, "b", "D"), "D.b");
      a.A = matrix(require(D, "A", "D"), "D.A", n);
      expect_size(a.A.size(), a.b.size() * n, "D.A");
      if (a.b.empty()) dimension("D must have at least one equation");
      inst.D = std::move(a);
      break;
    }
    case EnvelopeKind::General: malformed("kind 'general' cannot be read from a file");
  }
  if (j.contains("solver")) inst.solver = parse_solver(j["solver"]);

  // Range checks through the library's own validation.
  try {
    to_solver_config(inst.solver).validate();
    (void)build(to_spec(inst));
  } catch (const DimensionError& e) {
    dimension(e.what());
  } catch (const ParameterError& e) {
    range(e.what());
  }
  return inst;
}

Instance load_instance(const std::string& path, std::size_t max_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError(InstanceError::Category::Malformed, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), max_n);
}

std::string dump_instance(const Instance& inst) {
  json j;
  j["kind"] = to_string(inst.kind);
  json p = json::object();
  switch (inst.kind) {
    case EnvelopeKind::Moreau:
    case EnvelopeKind::FB:
    case EnvelopeKind::DR: p["gamma"] = inst.gamma; break;
    case EnvelopeKind::ADMM: p["rho"] = inst.rho; break;
    case EnvelopeKind::GAP:
      p["alpha1"] = inst.alpha1;
      p["alpha2"] = inst.alpha2;
      break;
    case EnvelopeKind::General: break;
  }
  j["parameters"] = p;
  if (inst.f_prox) j["f"] = function_json(*inst.f_prox);
  if (inst.f) j["f"] = json{{"H", vector_json(inst.f->H)}, {"h", vector_json(inst.f->h)}};
  if (inst.g) j["g"] = function_json(*inst.g);
  if (inst.C) j["C"] = function_json(*inst.C);
  if (inst.D) j["D"] = json{{"A", vector_json(inst.D->A)}, {"b", vector_json(inst.D->b)}};
  j["x0"] = vector_json(inst.x0);
  j["solver"] = json{{"method", to_string(inst.solver.method)}, {"alpha", inst.solver.alpha},
                     {"tol", inst.solver.tol},                  {"max_iter", inst.solver.max_iter},
                     {"seed", inst.solver.seed},                {"step", inst.solver.step}};
  return j.dump(2) + "\n";
}

}  // namespace envkit
