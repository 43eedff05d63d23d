#pragma once

#include <vector>

#include "costate/forms.hpp"

namespace costate {

/// Uniform grid on [0, T] with N steps of size h = T/N.
struct Grid {
  double horizon = 0.0;
  int steps = 0;

  Grid() = default;
  Grid(double horizon_, int steps_);

  double h() const { return horizon / steps; }
  double node(int k) const { return k == steps ? horizon : k * h(); }
};

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 25;
};

/// Node-wise (y_k, p_k) along a uniform grid. The control at node k is the
/// lambda component of y_k (optimality condition u = lambda).
struct DiscreteTrajectory {
  Grid grid;
  std::vector<PhasePoint> nodes;

  int dim() const { return nodes.empty() ? 0 : nodes.front().dim(); }
  const Vector& control(int k) const { return nodes[k].y.lam; }
};

/// Midpoint-quadrature discrete Lagrangian
/// L_d(y_a, y_b) = h * Ltilde((y_a + y_b)/2, (y_b - y_a)/h).
double discrete_lagrangian(const CombinedState& y_a, const CombinedState& y_b,
                           double h, const ForceField& force);

/// Gradient of L_d with respect to its first / second slot, returned in
/// (q-part, lam-part) layout.
CombinedState discrete_lagrangian_d1(const CombinedState& y_a, const CombinedState& y_b,
                                     double h, const ForceField& force);
CombinedState discrete_lagrangian_d2(const CombinedState& y_a, const CombinedState& y_b,
                                     double h, const ForceField& force);

/// Solves the discrete Euler-Lagrange equation
/// D2 L_d(y_prev, y_curr) + D1 L_d(y_curr, y_next) = 0 for y_next.
/// Linear force fields close in one Newton iteration.
CombinedState del_step(const CombinedState& y_prev, const CombinedState& y_curr,
                       double h, const ForceField& force,
                       const NewtonOptions& opts = {});

/// Position-momentum form of the same step: solves
/// p_k = -D1 L_d(y_k, y_next) for y_next, then p_next = D2 L_d(y_k, y_next).
PhasePoint momentum_form_step(const PhasePoint& z, double h, const ForceField& force,
                              const NewtonOptions& opts = {});

enum class Method { Variational, Rk4 };

/// Integrates the combined state-adjoint initial value problem. Initial data
/// is converted to momenta through the Legendre map. Throws on non-finite
/// states, naming the offending node.
DiscreteTrajectory integrate_ivp(const CombinedState& y0, const CombinedVelocity& ydot0,
                                 const Grid& grid, const ForceField& force, Method method,
                                 const NewtonOptions& opts = {});

/// Max over interior nodes of |D2 L_d(y_{k-1}, y_k) + D1 L_d(y_k, y_{k+1})|_inf.
double del_residual(const DiscreteTrajectory& traj, const ForceField& force);

/// Flat phase coordinates [q; lam; p_q; p_lam], the ordering the canonical
/// symplectic matrix in the diagnostics refers to.
Vector phase_to_vector(const PhasePoint& z);
PhasePoint phase_from_vector(const Vector& z);

} // namespace costate
