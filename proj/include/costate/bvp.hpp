#pragma once

#include <string>

#include "costate/integrator.hpp"

namespace costate {

/// Undetermined initial adjoint data the shooting iteration solves for.
struct ShootingUnknown {
  Vector lam0;
  Vector lamdot0;

  int dim() const { return static_cast<int>(lam0.size()); }
};

struct ShootingOptions {
  double tol = 1e-9;
  int max_iter = 50;
  double fd_increment = 1e-6;     // sensitivity matrix, scaled by max(1, |z_i|)
  int max_backtracks = 20;        // Armijo halvings
  Method method = Method::Variational;
  NewtonOptions newton;
  int multistart = 1;             // extra attempts with perturbed guesses
  unsigned seed = 0;
};

struct ShootingResult {
  ShootingUnknown unknown;
  DiscreteTrajectory trajectory;
  double residual_norm = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Terminal transversality residual
/// [dphi/dq(q_N, qd_N) - lamdot_N; dphi/dv(q_N, qd_N) + lam_N],
/// with terminal velocities recovered from momenta (qd = -p_lam, lamdot = -p_q).
Vector terminal_residual(const DiscreteTrajectory& traj, const TerminalCost& phi);

/// phi(q_N, qd_N) + trapezoidal quadrature of |u_k|^2/2 with u_k = lam_k.
double objective_of(const DiscreteTrajectory& traj, const TerminalCost& phi);

/// Single shooting: damped Newton on z = (lam0, lamdot0) with a
/// finite-difference sensitivity matrix. Returns the best iterate with a
/// convergence flag; never throws on non-convergence.
ShootingResult shoot(const Problem& problem, const Grid& grid,
                     const ShootingUnknown& guess, const ShootingOptions& opts = {});

} // namespace costate
