#pragma once

#include <vector>

#include "costate/integrator.hpp"
#include "costate/model.hpp"

namespace costate {

/// Piecewise-constant control: u_k holds on [t_k, t_{k+1}), k = 0..N-1.
struct ControlGrid {
  Grid grid;
  std::vector<Vector> u;

  int dim() const { return u.empty() ? 0 : static_cast<int>(u.front().size()); }
  static ControlGrid zeros(const Grid& grid, int n);
};

/// State samples (q_k, v_k) at the grid nodes.
struct StateTrajectory {
  Grid grid;
  std::vector<Vector> q;
  std::vector<Vector> v;
};

struct DirectOptions {
  double grad_tol = 1e-8;
  int max_iter = 500;
  int memory = 10;                // quasi-Newton history length
  double fd_increment = 1e-6;     // scaled central differences
  bool adjoint_gradient = false;  // reverse sweep instead of finite differences
};

struct DirectResult {
  ControlGrid controls;
  StateTrajectory states;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // per accepted iterate, non-increasing
};

/// Integrates (qd, vd) = (v, f(q) + u_k) with one classical RK4 stage set per
/// step, holding u_k fixed within the step.
StateTrajectory simulate_state(const Problem& problem, const ControlGrid& controls);

/// phi(q_N, v_N) + sum_k h |u_k|^2 / 2 (rectangle rule).
double discrete_objective(const Problem& problem, const ControlGrid& controls);

/// Central-difference gradient of discrete_objective in the N*n control
/// variables.
Vector objective_gradient_fd(const Problem& problem, const ControlGrid& controls,
                             double increment);

/// Exact gradient of the discrete objective by a reverse sweep through the
/// RK4 recursion.
Vector objective_gradient_adjoint(const Problem& problem, const ControlGrid& controls);

/// L-BFGS descent on the control variables with backtracking line search.
DirectResult optimize(const Problem& problem, const Grid& grid, const ControlGrid& init,
                      const DirectOptions& opts = {});

} // namespace costate
