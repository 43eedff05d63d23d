#include "costate/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "costate/bvp.hpp"
#include "costate/config.hpp"
#include "costate/csv.hpp"
#include "costate/diagnostics.hpp"
#include "costate/direct.hpp"

namespace costate::cli {

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string fmt(const Vector& x) {
  std::string out;
  for (int i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += fmt(x(i));
  }
  return out;
}

/// Generator the noether column and drift checks default to: the (0,1)-plane
/// rotation for O(n) fields with n >= 2, the z-axis for SO(3) fields.
std::optional<SymmetryGenerator> default_generator(const ForceField& force) {
  if (force.tag == EquivarianceTag::Rotation3d) {
    Vector axis(3);
    axis << 0, 0, 1;
    return SymmetryGenerator::so3_axis(axis);
  }
  if (force.tag == EquivarianceTag::OrthogonalGroup && force.dim >= 2)
    return SymmetryGenerator::rotation(force.dim, 0, 1);
  return std::nullopt;
}

Method method_of(const CommonArgs& args) {
  if (args.method == "variational") return Method::Variational;
  if (args.method == "rk4") return Method::Rk4;
  throw std::runtime_error("method must be 'variational' or 'rk4'");
}

Vector adjoint_flag_or_zero(const std::optional<Vector>& flag, int n, const char* name) {
  if (!flag) return Vector::Zero(n);
  if (flag->size() != n)
    throw std::runtime_error(std::string(name) + " must have " + std::to_string(n) + " entries");
  if (!flag->allFinite())
    throw std::runtime_error(std::string(name) + " must be finite");
  return *flag;
}

struct Loaded {
  RunConfig cfg;
  Problem problem;
  Grid grid;
};

Loaded load(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  Problem problem = cfg.make_problem();
  Grid grid = cfg.make_grid();
  return Loaded{std::move(cfg), std::move(problem), grid};
}

std::optional<std::string> csv_target(const CommonArgs& args, const RunConfig& cfg) {
  if (args.out_path) return args.out_path;
  return cfg.csv_path;
}

int with_config(const CommonArgs& args, int (*body)(const CommonArgs&, Loaded&)) {
  Loaded loaded;
  try {
    loaded = load(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return body(args, loaded);
}

int solve_body(const CommonArgs& args, Loaded& loaded) {
  const int n = loaded.problem.dim();
  ShootingOptions opts = loaded.cfg.shooting;
  try {
    opts.method = method_of(args);
    if (args.seed) opts.seed = *args.seed;
    ShootingUnknown guess{
        adjoint_flag_or_zero(args.lam0 ? args.lam0 : loaded.cfg.guess_lam0, n, "--lam0"),
        adjoint_flag_or_zero(args.lamdot0 ? args.lamdot0 : loaded.cfg.guess_lamdot0, n,
                             "--lamdot0")};

    const ShootingResult result = shoot(loaded.problem, loaded.grid, guess, opts);

    std::cout << "command: solve\n"
              << "force: " << loaded.problem.force.name << "\n"
              << "n: " << n << "\n"
              << "N: " << loaded.grid.steps << "\n"
              << "method: " << args.method << "\n"
              << "converged: " << (result.converged ? "yes" : "no") << "\n"
              << "iterations: " << result.iterations << "\n"
              << "residual: " << fmt(result.residual_norm) << "\n"
              << "objective: " << fmt(result.objective) << "\n"
              << "lam0: " << fmt(result.unknown.lam0) << "\n"
              << "lamdot0: " << fmt(result.unknown.lamdot0) << "\n";
    if (!result.converged) std::cout << "message: " << result.message << "\n";

    if (const auto out = csv_target(args, loaded.cfg); out && !result.trajectory.nodes.empty()) {
      const auto gen = default_generator(loaded.problem.force);
      write_csv(*out, tabulate(result.trajectory, loaded.problem.force, gen ? &*gen : nullptr),
                loaded.cfg.csv_precision);
      std::cout << "csv: " << *out << "\n";
    }
    return result.converged ? kExitOk : kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int simulate_body(const CommonArgs& args, Loaded& loaded) {
  const int n = loaded.problem.dim();
  try {
    const Vector lam0 = adjoint_flag_or_zero(args.lam0, n, "--lam0");
    const Vector lamdot0 = adjoint_flag_or_zero(args.lamdot0, n, "--lamdot0");
    const Method method = method_of(args);

    DiscreteTrajectory traj;
    try {
      traj = integrate_ivp(CombinedState{loaded.problem.q0, lam0},
                           CombinedVelocity{loaded.problem.v0, lamdot0}, loaded.grid,
                           loaded.problem.force, method, loaded.cfg.shooting.newton);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitNoConverge;
    }

    const DriftReport energy = hamiltonian_drift(traj, loaded.problem.force);
    std::cout << "command: simulate\n"
              << "force: " << loaded.problem.force.name << "\n"
              << "n: " << n << "\n"
              << "N: " << loaded.grid.steps << "\n"
              << "method: " << args.method << "\n"
              << "h_tilde_initial: " << fmt(energy.initial) << "\n"
              << "h_tilde_drift: " << fmt(energy.max_drift) << "\n";

    if (const auto out = csv_target(args, loaded.cfg)) {
      const auto gen = default_generator(loaded.problem.force);
      write_csv(*out, tabulate(traj, loaded.problem.force, gen ? &*gen : nullptr),
                loaded.cfg.csv_precision);
      std::cout << "csv: " << *out << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int direct_body(const CommonArgs& args, Loaded& loaded) {
  try {
    const DirectResult result = optimize(loaded.problem, loaded.grid,
                                         ControlGrid::zeros(loaded.grid, loaded.problem.dim()),
                                         loaded.cfg.direct);
    std::cout << "command: direct\n"
              << "force: " << loaded.problem.force.name << "\n"
              << "n: " << loaded.problem.dim() << "\n"
              << "N: " << loaded.grid.steps << "\n"
              << "converged: " << (result.converged ? "yes" : "no") << "\n"
              << "iterations: " << result.iterations << "\n"
              << "gradient_norm: " << fmt(result.gradient_norm) << "\n"
              << "objective: " << fmt(result.objective) << "\n";

    if (const auto out = csv_target(args, loaded.cfg)) {
      write_csv(*out, tabulate(result), loaded.cfg.csv_precision);
      std::cout << "csv: " << *out << "\n";
    }
    return result.converged ? kExitOk : kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int verify_body(const CommonArgs& args, Loaded& loaded) {
  const int n = loaded.problem.dim();
  const VerifyOptions& tols = loaded.cfg.verify;
  try {
    const auto in_path = csv_target(args, loaded.cfg);
    if (!in_path)
      throw std::runtime_error("verify needs a CSV path (--out flag or output.csv in the config)");
    const CsvTable table = read_csv(*in_path);
    if (table.dim != n) throw std::runtime_error("csv dimension disagrees with the config");
    if (static_cast<int>(table.rows.size()) != loaded.grid.steps + 1)
      throw std::runtime_error("csv row count disagrees with grid.N");

    DiscreteTrajectory traj;
    traj.grid = loaded.grid;
    for (size_t k = 0; k < table.rows.size(); ++k) {
      const CsvRow& row = table.rows[k];
      if (!row.lam || !row.lamdot)
        throw std::runtime_error("csv lacks costate columns; verify needs solve/simulate output");
      if (std::abs(row.t - loaded.grid.node(static_cast<int>(k))) >
          1e-9 * std::max(1.0, loaded.grid.horizon))
        throw std::runtime_error("csv time column disagrees with the grid");
      traj.nodes.push_back(
          legendre(CombinedState{row.q, *row.lam}, CombinedVelocity{row.qdot, *row.lamdot}));
    }

    bool ok = true;
    auto report = [&ok](const char* name, double value, double tol, bool enforced) {
      const bool pass = value <= tol;
      std::cout << name << ": " << (pass ? "pass" : "fail") << " (" << fmt(value)
                << (pass ? " <= " : " > ") << fmt(tol) << (enforced ? ")" : ", advisory)")
                << "\n";
      if (enforced) ok = ok && pass;
    };

    std::cout << "command: verify\n"
              << "csv: " << *in_path << "\n";
    report("check_del", del_residual(traj, loaded.problem.force), tols.del_tol,
           tols.strict_del);
    report("check_pmp", pmp_residual_along(traj, loaded.problem.force).max_residual,
           tols.pmp_tol, true);
    report("check_energy", hamiltonian_drift(traj, loaded.problem.force).max_drift,
           tols.energy_tol, true);
    if (const auto gen = default_generator(loaded.problem.force))
      report("check_noether", noether_drift(traj, *gen).max_drift, tols.noether_tol, true);
    const StepMap step = method_of(args) == Method::Variational
                             ? variational_step_map(loaded.problem.force,
                                                    loaded.cfg.shooting.newton)
                             : rk4_step_map(loaded.problem.force);
    report("check_symplectic", symplecticity_defect(step, traj.nodes.front(), loaded.grid.h()),
           tols.symp_tol, true);
    std::cout << "verdict: " << (ok ? "pass" : "fail") << "\n";
    return ok ? kExitOk : kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int compare_body(const CommonArgs& args, Loaded& loaded) {
  const int n = loaded.problem.dim();
  try {
    ShootingOptions opts = loaded.cfg.shooting;
    opts.method = method_of(args);
    if (args.seed) opts.seed = *args.seed;
    ShootingUnknown guess{
        adjoint_flag_or_zero(args.lam0 ? args.lam0 : loaded.cfg.guess_lam0, n, "--lam0"),
        adjoint_flag_or_zero(args.lamdot0 ? args.lamdot0 : loaded.cfg.guess_lamdot0, n,
                             "--lamdot0")};

    const ShootingResult indirect = shoot(loaded.problem, loaded.grid, guess, opts);
    const DirectResult direct = optimize(loaded.problem, loaded.grid,
                                         ControlGrid::zeros(loaded.grid, n), loaded.cfg.direct);

    std::cout << "command: compare\n"
              << "bvp_converged: " << (indirect.converged ? "yes" : "no") << "\n"
              << "bvp_objective: " << fmt(indirect.objective) << "\n"
              << "direct_converged: " << (direct.converged ? "yes" : "no") << "\n"
              << "direct_objective: " << fmt(direct.objective) << "\n";

    if (!indirect.trajectory.nodes.empty()) {
      double gap = 0.0;
      for (int k = 0; k < loaded.grid.steps; ++k)
        gap = std::max(gap, (direct.controls.u[k] - indirect.trajectory.control(k))
                                .lpNorm<Eigen::Infinity>());
      std::cout << "control_gap: " << fmt(gap) << "\n"
                << "objective_gap: " << fmt(std::abs(indirect.objective - direct.objective))
                << "\n";
    }
    return (indirect.converged && direct.converged) ? kExitOk : kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

} // namespace

int cmd_solve(const CommonArgs& args) { return with_config(args, solve_body); }
int cmd_simulate(const CommonArgs& args) { return with_config(args, simulate_body); }
int cmd_direct(const CommonArgs& args) { return with_config(args, direct_body); }
int cmd_verify(const CommonArgs& args) { return with_config(args, verify_body); }
int cmd_compare(const CommonArgs& args) { return with_config(args, compare_body); }

int run(const std::vector<std::string>& argv) {
  CLI::App app{"optimal control of q'' = f(q) + u via the combined state-adjoint system"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<double> lam0_raw, lamdot0_raw;
  int seed_raw = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "path to the JSON run configuration")
        ->required();
    cmd->add_option("--method", args.method, "integrator: variational | rk4");
    cmd->add_option("--lam0", lam0_raw, "initial adjoint lambda(0) (simulate) or guess (solve)");
    cmd->add_option("--lamdot0", lamdot0_raw, "initial adjoint rate (simulate) or guess (solve)");
    cmd->add_option("--out", args.out_path, "CSV path (overrides output.csv)");
    cmd->add_option("--seed", seed_raw, "seed for multi-start perturbations");
  };

  CLI::App* solve = app.add_subcommand("solve", "shoot for the optimality system's BVP");
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the combined IVP");
  CLI::App* direct = app.add_subcommand("direct", "direct transcription optimizer");
  CLI::App* verify = app.add_subcommand("verify", "re-check invariants of an exported CSV");
  CLI::App* compare = app.add_subcommand("compare", "run both solvers and report gaps");
  for (CLI::App* cmd : {solve, simulate, direct, verify, compare}) add_common(cmd);

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!lam0_raw.empty()) args.lam0 = Eigen::Map<const Vector>(lam0_raw.data(), lam0_raw.size());
  if (!lamdot0_raw.empty())
    args.lamdot0 = Eigen::Map<const Vector>(lamdot0_raw.data(), lamdot0_raw.size());
  if (seed_raw >= 0) args.seed = static_cast<unsigned>(seed_raw);

  if (solve->parsed()) return cmd_solve(args);
  if (simulate->parsed()) return cmd_simulate(args);
  if (direct->parsed()) return cmd_direct(args);
  if (verify->parsed()) return cmd_verify(args);
  if (compare->parsed()) return cmd_compare(args);
  return kExitUsage;
}

} // namespace costate::cli
