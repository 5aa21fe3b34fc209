#include "envkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "envkit/format.hpp"
#include "envkit/instance.hpp"
#include "envkit/verify.hpp"

namespace envkit {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t max_dimension() {
  const char* env = std::getenv("ENVKIT_MAX_N");
  if (!env || !*env) return 500;
  std::size_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [ptr, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || ptr != end || v == 0) throw UsageError("ENVKIT_MAX_N must be a positive integer");
  return v;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

Vector parse_point(const std::string& csv) {
  Vector out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (tok.empty() || ec != std::errc() || ptr != e || !std::isfinite(v))
      throw UsageError("--point: '" + tok + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--point: empty list");
  return out;
}

void write_trace(std::ostream& os, const Trace& trace) {
  os << "k,F,grad_norm,fp_residual\n";
  for (const auto& r : trace.records)
    os << r.k << ',' << format_double(r.F) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.fp_residual) << '\n';
}

int cmd_solve(const std::string& path, const std::string& trace_out, bool dump, std::ostream& out) {
  const Instance inst = load_instance(path, max_dimension());
  if (dump) {
    out << dump_instance(inst);
    return 0;
  }
  const EnvelopeSpec spec = to_spec(inst);
  const GeneralEnvelope env = build(spec);
  const SolveResult res = solve(inst.solver.method, env, inst.x0, to_solver_config(inst.solver));

  if (trace_out.empty() || trace_out == "-") {
    write_trace(out, res.trace);
  } else {
    std::ofstream f(trace_out, std::ios::binary);
    if (!f) throw UsageError("cannot write trace to '" + trace_out + "'");
    write_trace(f, res.trace);
  }

  const bool converged = res.trace.status == SolverStatus::Converged;
  const auto& last = res.trace.records.back();
  const Vector sol = solution_extract(spec, res.x);
  out << "# kind: " << to_string(inst.kind) << '\n';
  out << "# method: " << to_string(inst.solver.method) << '\n';
  out << "# status: " << (converged ? "converged" : "max_iter") << '\n';
  out << "# iterations: " << last.k << '\n';
  out << "# F: " << format_double(last.F) << '\n';
  out << "# grad_norm: " << format_double(last.grad_norm) << '\n';
  out << "# fp_residual: " << format_double(last.fp_residual) << '\n';
  out << "# x: " << format_vector(res.x) << '\n';
  out << "# solution: " << format_vector(sol) << '\n';
  if (const auto* gap = std::get_if<GapSpec>(&spec)) {
    out << "# residual_D: " << format_double(gap->D.residual(sol)) << '\n';
    out << "# dist_C: " << format_double(norm(sub(sol, prox(gap->C, 1.0, sol)))) << '\n';
  }
  return converged ? 0 : 2;
}

int cmd_eval(const std::string& path, const std::string& point, std::ostream& out) {
  const Instance inst = load_instance(path, max_dimension());
  const GeneralEnvelope env = build(to_spec(inst));
  const Vector x = point.empty() ? inst.x0 : parse_point(point);
  if (x.size() != env.dim())
    throw InstanceError(InstanceError::Category::DimensionMismatch,
                        "--point has " + std::to_string(x.size()) + " entries, instance dimension is " +
                            std::to_string(env.dim()));
  const auto e = env.evaluate(x);
  const auto b = bounds(env);
  out << "F = " << format_double(e.value) << '\n';
  out << "grad = " << format_vector(e.gradient) << '\n';
  out << "fp_residual = " << format_double(e.residual) << '\n';
  out << "beta_l = " << format_double(b.beta_l) << '\n';
  out << "beta_u = " << format_double(b.beta_u) << '\n';
  return 0;
}

int cmd_verify(std::uint64_t seed, int trials, const std::string& only, std::ostream& out, std::ostream& err) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  const auto& checks = all_checks();
  std::vector<const NamedCheck*> selected;
  if (only.empty()) {
    for (const auto& c : checks) selected.push_back(&c);
  } else {
    std::stringstream ss(only);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name = trim(name);
      auto it = std::find_if(checks.begin(), checks.end(), [&](const NamedCheck& c) { return c.name == name; });
      if (it == checks.end()) {
        std::string names;
        for (const auto& c : checks) names += (names.empty() ? "" : ", ") + c.name;
        throw UsageError("unknown check '" + name + "'; valid names: " + names);
      }
      selected.push_back(&*it);
    }
  }
  bool all_pass = true;
  for (const auto* c : selected) {
    const CheckReport r = c->run(seed, trials);
    out << r.to_json() << '\n';
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) err << "verification failed\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope functions for splitting methods: solve, evaluate, verify", "envkit"};
  app.require_subcommand(1);

  std::string path, trace_out, point, only;
  bool dump = false;
  std::uint64_t seed = 7;
  int trials = 100;

  auto* solve_cmd = app.add_subcommand("solve", "Run the configured solver on an instance file");
  solve_cmd->add_option("instance", path, "Instance JSON file")->required();
  solve_cmd->add_option("--trace-out", trace_out, "Trace CSV destination (default: stdout)");
  solve_cmd->add_flag("--dump-normalized", dump, "Print the normalized instance and exit");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the envelope at a point");
  eval_cmd->add_option("instance", path, "Instance JSON file")->required();
  eval_cmd->add_option("--point", point, "Comma-separated point (default: x0)");
  eval_cmd->add_flag("--dump-normalized", dump, "Print the normalized instance and exit");

  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized verification suite");
  verify_cmd->add_option("--seed", seed, "Base seed");
  verify_cmd->add_option("--trials", trials, "Trials per check");
  verify_cmd->add_option("--only", only, "Comma-separated check names");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(path, trace_out, dump, out);
    if (*eval_cmd) {
      if (dump) {
        out << dump_instance(load_instance(path, max_dimension()));
        return 0;
      }
      return cmd_eval(path, point, out);
    }
    return cmd_verify(seed, trials, only, out, err);
  } catch (const InstanceError& e) {
    err << "error: " << e.category_name() << ": " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace envkit
