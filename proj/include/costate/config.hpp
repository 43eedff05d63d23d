#pragma once

#include <optional>
#include <string>

#include "costate/bvp.hpp"
#include "costate/direct.hpp"
#include "costate/model.hpp"

namespace costate {

struct VerifyOptions {
  double pmp_tol = 1e-3;       // stationarity residual via time differences, O(h^2)
  double energy_tol = 1e-3;    // Hamiltonian drift
  double noether_tol = 1e-9;   // momentum drift (checked when a symmetry exists)
  double del_tol = 1e-10;      // interior discrete Euler-Lagrange residual
  double symp_tol = 1e-4;      // one-step Jacobian defect at the initial node
  bool strict_del = false;     // enforce del_tol (meaningful for variational data only)
};

/// Everything a run needs, as loaded from one JSON file. Unknown keys
/// anywhere in the file are an error.
struct RunConfig {
  std::string force_name;
  ProblemParams params;
  int steps = 100;
  ShootingOptions shooting;
  std::optional<Vector> guess_lam0;     // shooting initial guess, default zero
  std::optional<Vector> guess_lamdot0;
  DirectOptions direct;
  VerifyOptions verify;
  std::optional<std::string> csv_path;
  int csv_precision = 17;  // significant digits

  Problem make_problem() const { return builtin_problem(force_name, params); }
  Grid make_grid() const { return Grid{params.horizon, steps}; }
};

/// Throws std::runtime_error with a path-qualified message on any schema
/// violation (unknown key, wrong type, bad dimension, missing field).
RunConfig load_config(const std::string& path);

} // namespace costate
