#pragma once

#include <functional>
#include <vector>

#include "costate/forms.hpp"
#include "costate/integrator.hpp"
#include "costate/model.hpp"

namespace costate {

/// Infinitesimal generator xi of a one-parameter subgroup acting on q. The
/// lift to (q, lam) uses -xi^T on the costate leg, so the invariance theory
/// below expects xi skew-symmetric (subgroups of O(n)).
struct SymmetryGenerator {
  Matrix xi;

  static SymmetryGenerator rotation(int n, int axis_i, int axis_j);
  static SymmetryGenerator so3_axis(const Vector& axis);
};

/// Conserved pairing I = p_q . (xi q) + p_lam . (xi lam).
double noether_momentum(const PhasePoint& z, const SymmetryGenerator& gen);

/// max_k |g(z_k) - g(z_0)| for a scalar observable g along a trajectory.
struct DriftReport {
  double initial = 0.0;
  double max_drift = 0.0;
  std::vector<double> values;
};

DriftReport hamiltonian_drift(const DiscreteTrajectory& traj, const ForceField& force);
DriftReport noether_drift(const DiscreteTrajectory& traj, const SymmetryGenerator& gen);

/// Samples |L(exp(s xi) . y, exp(s xi) . ydot) - L(y, ydot)| / (1 + |L|) at
/// random points; returns the max over the trials. Near zero iff the group
/// action preserves the Lagrangian.
double lagrangian_invariance_check(const ForceField& force, const Matrix& generator,
                                   int trials, unsigned seed, double scale = 1.0);

/// One-step map of the phase flow, for symplecticity probes.
using StepMap = std::function<PhasePoint(const PhasePoint&, double)>;

StepMap variational_step_map(const ForceField& force, const NewtonOptions& newton = {});
StepMap rk4_step_map(const ForceField& force);
StepMap explicit_euler_step_map(const ForceField& force);

/// |DF^T J DF - J|_inf where DF is the forward-difference Jacobian of the
/// one-step map at the probe point.
double symplecticity_defect(const StepMap& step, const PhasePoint& probe, double h,
                            double fd_increment = 1e-5);

/// Pointwise stationarity residual of the optimality system along a
/// trajectory, with u = lam and the costates read off the trajectory's
/// momenta. Time derivatives of the multipliers come from central
/// differences on the interior (one-sided second-order at the ends), so the
/// trajectory needs at least five nodes.
struct PMPResidualReport {
  double max_residual = 0.0;
  std::vector<double> per_node;
};

PMPResidualReport pmp_residual_along(const DiscreteTrajectory& traj, const ForceField& force);

/// Scaling-and-squaring Taylor approximation, adequate for the small dense
/// generators used here.
Matrix matrix_exponential(const Matrix& a);

} // namespace costate
