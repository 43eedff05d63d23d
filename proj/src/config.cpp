#include "costate/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "json.hpp"

namespace costate {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("config: " + what);
}

void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path + " must be an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) fail("unknown key " + path + "." + item.key());
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.at(key).is_number()) fail(path + "." + key + " must be a number");
  return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj, path, key);
}

int integer_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) fail(path + "." + key + " must be an integer");
  return obj.at(key).get<int>();
}

bool boolean_or(const json& obj, const std::string& path, const std::string& key,
                bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(path + "." + key + " must be a boolean");
  return obj.at(key).get<bool>();
}

Vector vector_at(const json& obj, const std::string& path, const std::string& key, int n) {
  const json& arr = obj.at(key);
  if (!arr.is_array()) fail(path + "." + key + " must be an array of numbers");
  if (static_cast<int>(arr.size()) != n)
    fail(path + "." + key + " must have length " + std::to_string(n));
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    if (!arr[i].is_number()) fail(path + "." + key + " must contain numbers only");
    out(i) = arr[i].get<double>();
  }
  return out;
}

Matrix matrix_at(const json& obj, const std::string& path, const std::string& key, int n) {
  const json& arr = obj.at(key);
  if (!arr.is_array() || static_cast<int>(arr.size()) != n)
    fail(path + "." + key + " must be an array of " + std::to_string(n) + " rows");
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    if (!arr[i].is_array() || static_cast<int>(arr[i].size()) != n)
      fail(path + "." + key + " rows must have length " + std::to_string(n));
    for (int j = 0; j < n; ++j) {
      if (!arr[i][j].is_number()) fail(path + "." + key + " must contain numbers only");
      out(i, j) = arr[i][j].get<double>();
    }
  }
  return out;
}

Method method_from(const std::string& name) {
  if (name == "variational") return Method::Variational;
  if (name == "rk4") return Method::Rk4;
  fail("solver.method must be 'variational' or 'rk4'");
}

} // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "(root)", {"problem", "grid", "solver", "direct", "output", "verify"});
  if (!root.contains("problem")) fail("missing block problem");
  if (!root.contains("grid")) fail("missing block grid");

  RunConfig cfg;

  const json& prob = root.at("problem");
  check_keys(prob, "problem", {"force", "n", "q0", "v0", "T", "terminal"});
  for (const char* key : {"force", "n", "q0", "v0", "T", "terminal"})
    if (!prob.contains(key)) fail(std::string("missing key problem.") + key);

  if (!prob.at("n").is_number_integer()) fail("problem.n must be an integer");
  const int n = prob.at("n").get<int>();
  if (n < 1) fail("problem.n must be positive");
  cfg.params.n = n;

  const json& force = prob.at("force");
  check_keys(force, "problem.force", {"name", "params"});
  if (!force.contains("name") || !force.at("name").is_string())
    fail("problem.force.name must be a string");
  cfg.force_name = force.at("name").get<std::string>();
  const json params = force.contains("params") ? force.at("params") : json::object();
  if (cfg.force_name == "spring") {
    check_keys(params, "problem.force.params", {"stiffness"});
    if (!params.contains("stiffness")) fail("missing key problem.force.params.stiffness");
    cfg.params.stiffness = number_at(params, "problem.force.params", "stiffness");
  } else if (cfg.force_name == "central") {
    check_keys(params, "problem.force.params", {"mu"});
    if (!params.contains("mu")) fail("missing key problem.force.params.mu");
    cfg.params.mu = number_at(params, "problem.force.params", "mu");
  } else if (cfg.force_name == "linear") {
    check_keys(params, "problem.force.params", {"a"});
    if (!params.contains("a")) fail("missing key problem.force.params.a");
    cfg.params.a = matrix_at(params, "problem.force.params", "a", n);
  } else if (cfg.force_name == "doublewell") {
    check_keys(params, "problem.force.params", {});
  } else {
    fail("problem.force.name must be one of linear, spring, central, doublewell");
  }

  cfg.params.q0 = vector_at(prob, "problem", "q0", n);
  cfg.params.v0 = vector_at(prob, "problem", "v0", n);
  cfg.params.horizon = number_at(prob, "problem", "T");
  if (!(cfg.params.horizon > 0.0)) fail("problem.T must be positive");

  const json& terminal = prob.at("terminal");
  check_keys(terminal, "problem.terminal", {"w_q", "w_v", "q_target", "v_target"});
  for (const char* key : {"w_q", "w_v"})
    if (!terminal.contains(key)) fail(std::string("missing key problem.terminal.") + key);
  cfg.params.w_q = number_at(terminal, "problem.terminal", "w_q");
  cfg.params.w_v = number_at(terminal, "problem.terminal", "w_v");
  if (cfg.params.w_q < 0.0 || cfg.params.w_v < 0.0)
    fail("problem.terminal weights must be nonnegative");
  cfg.params.q_target = terminal.contains("q_target")
                            ? vector_at(terminal, "problem.terminal", "q_target", n)
                            : Vector::Zero(n);
  cfg.params.v_target = terminal.contains("v_target")
                            ? vector_at(terminal, "problem.terminal", "v_target", n)
                            : Vector::Zero(n);

  const json& grid = root.at("grid");
  check_keys(grid, "grid", {"N"});
  if (!grid.contains("N")) fail("missing key grid.N");
  if (!grid.at("N").is_number_integer()) fail("grid.N must be an integer");
  cfg.steps = grid.at("N").get<int>();
  if (cfg.steps < 1) fail("grid.N must be at least 1");

  if (root.contains("solver")) {
    const json& solver = root.at("solver");
    check_keys(solver, "solver",
               {"tol", "max_iter", "fd_increment", "max_backtracks", "method", "multistart",
                "seed", "lam0", "lamdot0", "newton_tol", "newton_max_iter"});
    cfg.shooting.tol = number_or(solver, "solver", "tol", cfg.shooting.tol);
    cfg.shooting.max_iter = integer_or(solver, "solver", "max_iter", cfg.shooting.max_iter);
    cfg.shooting.fd_increment =
        number_or(solver, "solver", "fd_increment", cfg.shooting.fd_increment);
    cfg.shooting.max_backtracks =
        integer_or(solver, "solver", "max_backtracks", cfg.shooting.max_backtracks);
    if (solver.contains("method")) {
      if (!solver.at("method").is_string()) fail("solver.method must be a string");
      cfg.shooting.method = method_from(solver.at("method").get<std::string>());
    }
    cfg.shooting.multistart = integer_or(solver, "solver", "multistart", cfg.shooting.multistart);
    if (cfg.shooting.multistart < 1) fail("solver.multistart must be at least 1");
    const int seed = integer_or(solver, "solver", "seed", static_cast<int>(cfg.shooting.seed));
    if (seed < 0) fail("solver.seed must be nonnegative");
    cfg.shooting.seed = static_cast<unsigned>(seed);
    cfg.shooting.newton.tol = number_or(solver, "solver", "newton_tol", cfg.shooting.newton.tol);
    cfg.shooting.newton.max_iter =
        integer_or(solver, "solver", "newton_max_iter", cfg.shooting.newton.max_iter);
    if (solver.contains("lam0")) cfg.guess_lam0 = vector_at(solver, "solver", "lam0", n);
    if (solver.contains("lamdot0")) cfg.guess_lamdot0 = vector_at(solver, "solver", "lamdot0", n);
    if (!(cfg.shooting.tol > 0.0) || !(cfg.shooting.newton.tol > 0.0))
      fail("solver tolerances must be positive");
    if (cfg.shooting.max_iter < 0 || cfg.shooting.newton.max_iter < 1)
      fail("solver iteration limits out of range");
  }

  if (root.contains("direct")) {
    const json& direct = root.at("direct");
    check_keys(direct, "direct",
               {"grad_tol", "max_iter", "memory", "fd_increment", "adjoint_gradient"});
    cfg.direct.grad_tol = number_or(direct, "direct", "grad_tol", cfg.direct.grad_tol);
    cfg.direct.max_iter = integer_or(direct, "direct", "max_iter", cfg.direct.max_iter);
    cfg.direct.memory = integer_or(direct, "direct", "memory", cfg.direct.memory);
    cfg.direct.fd_increment = number_or(direct, "direct", "fd_increment", cfg.direct.fd_increment);
    cfg.direct.adjoint_gradient =
        boolean_or(direct, "direct", "adjoint_gradient", cfg.direct.adjoint_gradient);
    if (!(cfg.direct.grad_tol > 0.0) || cfg.direct.max_iter < 0 || cfg.direct.memory < 1)
      fail("direct options out of range");
  }

  if (root.contains("output")) {
    const json& output = root.at("output");
    check_keys(output, "output", {"csv", "precision"});
    if (output.contains("csv")) {
      if (!output.at("csv").is_string()) fail("output.csv must be a string");
      cfg.csv_path = output.at("csv").get<std::string>();
    }
    cfg.csv_precision = integer_or(output, "output", "precision", cfg.csv_precision);
    if (cfg.csv_precision < 1 || cfg.csv_precision > 17)
      fail("output.precision must be in [1, 17]");
  }

  if (root.contains("verify")) {
    const json& verify = root.at("verify");
    check_keys(verify, "verify",
               {"pmp_tol", "energy_tol", "noether_tol", "del_tol", "symp_tol", "strict_del"});
    cfg.verify.pmp_tol = number_or(verify, "verify", "pmp_tol", cfg.verify.pmp_tol);
    cfg.verify.energy_tol = number_or(verify, "verify", "energy_tol", cfg.verify.energy_tol);
    cfg.verify.noether_tol = number_or(verify, "verify", "noether_tol", cfg.verify.noether_tol);
    cfg.verify.del_tol = number_or(verify, "verify", "del_tol", cfg.verify.del_tol);
    cfg.verify.symp_tol = number_or(verify, "verify", "symp_tol", cfg.verify.symp_tol);
    cfg.verify.strict_del = boolean_or(verify, "verify", "strict_del", cfg.verify.strict_del);
  }

  cfg.make_problem();  // full dimensional validation through the registry
  return cfg;
}

} // namespace costate
