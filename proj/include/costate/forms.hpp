#pragma once

#include <utility>

#include "costate/model.hpp"
#include "costate/types.hpp"

namespace costate {

/// Point y = (q, lambda) on the combined state-adjoint configuration space.
struct CombinedState {
  Vector q;
  Vector lam;

  int dim() const { return static_cast<int>(q.size()); }
};

/// Tangent vector ydot = (qdot, lamdot).
struct CombinedVelocity {
  Vector qdot;
  Vector lamdot;

  int dim() const { return static_cast<int>(qdot.size()); }
};

/// Canonical point (y, p_y) with p_y = (p_q, p_lam).
/// Under the Legendre map of the combined Lagrangian, p_q = -lamdot and
/// p_lam = -qdot.
struct PhasePoint {
  CombinedState y;
  Vector p_q;
  Vector p_lam;

  int dim() const { return y.dim(); }
};

/// Full first-order tuple of the maximum-principle system.
struct PMPPoint {
  Vector q;
  Vector v;
  Vector lam_q;
  Vector lam_v;
  Vector u;

  int dim() const { return static_cast<int>(q.size()); }
};

/// Time derivatives supplied externally when evaluating PMP residuals.
struct PMPDerivatives {
  Vector qdot;
  Vector vdot;
  Vector lamdot_q;
  Vector lamdot_v;
};

/// Adapted coordinates (q, mu, v, lam) of the iterated bundle; the domain of
/// the pre-flip Lagrangian and of the flip involution.
struct BundlePoint {
  Vector q;
  Vector mu;
  Vector v;
  Vector lam;
};

/// H(q,v,lam_q,lam_v,u) = lam_q.v + lam_v.f(q) + lam_v.u - |u|^2/2.
double pmp_hamiltonian(const PMPPoint& p, const ForceField& force);

/// Stacked residual [qd - v; vd - f(q) - u; ld_q + J^T lam_v; ld_v + lam_q; u - lam_v].
Vector pmp_residual(const PMPPoint& p, const PMPDerivatives& d, const ForceField& force);

/// |u|^2/2 + lam_q.(qd - v) + lam_v.(vd - f(q)) - lam_v.u.
double augmented_lagrangian(const Vector& q, const Vector& v, const Vector& qdot,
                            const Vector& vdot, const Vector& lam_q, const Vector& lam_v,
                            const Vector& u, const ForceField& force);

/// |u|^2/2 - mu.v - lam.(f(q) + u).
double hat_lagrangian(const BundlePoint& x, const Vector& u, const ForceField& force);

/// (q, mu, v, lam) -> (q, lam, v, mu). Applying it twice is the identity.
BundlePoint flip_involution(const BundlePoint& x);

/// Combined Lagrangian with the control still present:
/// |u|^2/2 - lamdot.qdot - lam.(f(q) + u).
double new_lagrangian_u(const CombinedState& y, const CombinedVelocity& ydot,
                        const Vector& u, const ForceField& force);

/// Control-eliminated combined Lagrangian:
/// Ltilde(y, ydot) = -lamdot.qdot - lam.f(q) - |lam|^2/2.
double new_lagrangian(const CombinedState& y, const CombinedVelocity& ydot,
                      const ForceField& force);

/// Stacked Euler-Lagrange residual [lamdd - J^T lam; qdd - f(q) - lam].
Vector el_residual(const CombinedState& y, const CombinedVelocity& ydot,
                   const CombinedVelocity& yddot, const ForceField& force);

/// Legendre map: p_q = -lamdot, p_lam = -qdot.
PhasePoint legendre(const CombinedState& y, const CombinedVelocity& ydot);

/// Inverse of legendre(): qdot = -p_lam, lamdot = -p_q.
std::pair<CombinedState, CombinedVelocity> legendre_inverse(const PhasePoint& pp);

/// Htilde(y, p) = -p_lam.p_q + lam.f(q) + |lam|^2/2.
double new_hamiltonian(const PhasePoint& pp, const ForceField& force);

/// Right-hand side of the canonical equations for Htilde.
struct PhaseVelocity {
  CombinedVelocity ydot;   // (-p_lam, -p_q)
  Vector pdot_q;           // -J(q)^T lam
  Vector pdot_lam;         // -f(q) - lam
};

PhaseVelocity hamilton_rhs(const PhasePoint& pp, const ForceField& force);

} // namespace costate
