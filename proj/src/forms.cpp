#include "costate/forms.hpp"

#include <stdexcept>

namespace costate {

namespace {

void require_dim(int expected, const Vector& x, const char* who) {
  if (x.size() != expected) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

} // namespace

double pmp_hamiltonian(const PMPPoint& p, const ForceField& force) {
  const int n = force.dim;
  require_dim(n, p.q, "pmp_hamiltonian");
  require_dim(n, p.v, "pmp_hamiltonian");
  require_dim(n, p.lam_q, "pmp_hamiltonian");
  require_dim(n, p.lam_v, "pmp_hamiltonian");
  require_dim(n, p.u, "pmp_hamiltonian");
  return p.lam_q.dot(p.v) + p.lam_v.dot(force.eval(p.q)) + p.lam_v.dot(p.u) -
         0.5 * p.u.squaredNorm();
}

Vector pmp_residual(const PMPPoint& p, const PMPDerivatives& d, const ForceField& force) {
  const int n = force.dim;
  require_dim(n, p.q, "pmp_residual");
  require_dim(n, d.qdot, "pmp_residual");
  Vector r(5 * n);
  r.segment(0, n) = d.qdot - p.v;
  r.segment(n, n) = d.vdot - force.eval(p.q) - p.u;
  r.segment(2 * n, n) = d.lamdot_q + force.jacobian(p.q).transpose() * p.lam_v;
  r.segment(3 * n, n) = d.lamdot_v + p.lam_q;
  r.segment(4 * n, n) = p.u - p.lam_v;
  return r;
}

double augmented_lagrangian(const Vector& q, const Vector& v, const Vector& qdot,
                            const Vector& vdot, const Vector& lam_q, const Vector& lam_v,
                            const Vector& u, const ForceField& force) {
  require_dim(force.dim, q, "augmented_lagrangian");
  return 0.5 * u.squaredNorm() + lam_q.dot(qdot - v) + lam_v.dot(vdot - force.eval(q)) -
         lam_v.dot(u);
}

double hat_lagrangian(const BundlePoint& x, const Vector& u, const ForceField& force) {
  require_dim(force.dim, x.q, "hat_lagrangian");
  return 0.5 * u.squaredNorm() - x.mu.dot(x.v) - x.lam.dot(force.eval(x.q) + u);
}

BundlePoint flip_involution(const BundlePoint& x) {
  return BundlePoint{x.q, x.lam, x.v, x.mu};
}

double new_lagrangian_u(const CombinedState& y, const CombinedVelocity& ydot,
                        const Vector& u, const ForceField& force) {
  return hat_lagrangian(flip_involution(BundlePoint{y.q, y.lam, ydot.qdot, ydot.lamdot}), u,
                        force);
}

double new_lagrangian(const CombinedState& y, const CombinedVelocity& ydot,
                      const ForceField& force) {
  require_dim(force.dim, y.q, "new_lagrangian");
  return -ydot.lamdot.dot(ydot.qdot) - y.lam.dot(force.eval(y.q)) - 0.5 * y.lam.squaredNorm();
}

Vector el_residual(const CombinedState& y, const CombinedVelocity& ydot,
                   const CombinedVelocity& yddot, const ForceField& force) {
  const int n = force.dim;
  require_dim(n, y.q, "el_residual");
  (void)ydot;  // first derivatives drop out of both rows
  Vector r(2 * n);
  r.segment(0, n) = yddot.lamdot - force.jacobian(y.q).transpose() * y.lam;
  r.segment(n, n) = yddot.qdot - force.eval(y.q) - y.lam;
  return r;
}

PhasePoint legendre(const CombinedState& y, const CombinedVelocity& ydot) {
  return PhasePoint{y, -ydot.lamdot, -ydot.qdot};
}

std::pair<CombinedState, CombinedVelocity> legendre_inverse(const PhasePoint& pp) {
  return {pp.y, CombinedVelocity{-pp.p_lam, -pp.p_q}};
}

double new_hamiltonian(const PhasePoint& pp, const ForceField& force) {
  require_dim(force.dim, pp.y.q, "new_hamiltonian");
  return -pp.p_lam.dot(pp.p_q) + pp.y.lam.dot(force.eval(pp.y.q)) +
         0.5 * pp.y.lam.squaredNorm();
}

PhaseVelocity hamilton_rhs(const PhasePoint& pp, const ForceField& force) {
  require_dim(force.dim, pp.y.q, "hamilton_rhs");
  PhaseVelocity out;
  out.ydot = CombinedVelocity{-pp.p_lam, -pp.p_q};
  out.pdot_q = -force.jacobian(pp.y.q).transpose() * pp.y.lam;
  out.pdot_lam = -force.eval(pp.y.q) - pp.y.lam;
  return out;
}

} // namespace costate
