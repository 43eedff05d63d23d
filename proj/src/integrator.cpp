#include "costate/integrator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace costate {

Grid::Grid(double horizon_, int steps_) : horizon(horizon_), steps(steps_) {
  if (steps < 1) throw std::invalid_argument("grid: step count must be at least 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("grid: horizon must be finite and positive");
}

namespace {

struct Midpoint {
  Vector q_m;
  Vector lam_m;
  Vector dq;    // q_b - q_a
  Vector dlam;  // lam_b - lam_a
};

Midpoint midpoint_of(const CombinedState& y_a, const CombinedState& y_b) {
  return Midpoint{0.5 * (y_a.q + y_b.q), 0.5 * (y_a.lam + y_b.lam), y_b.q - y_a.q,
                  y_b.lam - y_a.lam};
}

} // namespace

double discrete_lagrangian(const CombinedState& y_a, const CombinedState& y_b, double h,
                           const ForceField& force) {
  const Midpoint m = midpoint_of(y_a, y_b);
  return -m.dlam.dot(m.dq) / h - h * m.lam_m.dot(force.eval(m.q_m)) -
         0.5 * h * m.lam_m.squaredNorm();
}

CombinedState discrete_lagrangian_d1(const CombinedState& y_a, const CombinedState& y_b,
                                     double h, const ForceField& force) {
  const Midpoint m = midpoint_of(y_a, y_b);
  CombinedState g;
  g.q = m.dlam / h - 0.5 * h * force.jacobian(m.q_m).transpose() * m.lam_m;
  g.lam = m.dq / h - 0.5 * h * (force.eval(m.q_m) + m.lam_m);
  return g;
}

CombinedState discrete_lagrangian_d2(const CombinedState& y_a, const CombinedState& y_b,
                                     double h, const ForceField& force) {
  const Midpoint m = midpoint_of(y_a, y_b);
  CombinedState g;
  g.q = -m.dlam / h - 0.5 * h * force.jacobian(m.q_m).transpose() * m.lam_m;
  g.lam = -m.dq / h - 0.5 * h * (force.eval(m.q_m) + m.lam_m);
  return g;
}

namespace {

// Solves r + D1 L_d(y_base, w) = 0 for w. Shared by the DEL step (r is the
// D2 term of the trailing pair) and the momentum step (r is p_k). The Newton
// matrix drops the second derivative of f, which makes it exact for linear
// force fields; damping handles the rest.
CombinedState solve_implicit(const Vector& r_q, const Vector& r_lam,
                             const CombinedState& y_base, const CombinedState& guess,
                             double h, const ForceField& force, const NewtonOptions& opts,
                             const char* who) {
  const int n = y_base.dim();
  CombinedState w = guess;

  auto residual = [&](const CombinedState& cand) -> Vector {
    const CombinedState d1 = discrete_lagrangian_d1(y_base, cand, h, force);
    Vector r(2 * n);
    r.segment(0, n) = r_q + d1.q;
    r.segment(n, n) = r_lam + d1.lam;
    return r;
  };

  Vector res = residual(w);
  double res_norm = res.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < opts.max_iter; ++it) {
    if (res_norm <= opts.tol) return w;

    const Vector q_m = 0.5 * (y_base.q + w.q);
    const Matrix j = force.jacobian(q_m);
    Matrix k = Matrix::Zero(2 * n, 2 * n);
    k.block(0, n, n, n) = Matrix::Identity(n, n) / h - 0.25 * h * j.transpose();
    k.block(n, 0, n, n) = Matrix::Identity(n, n) / h - 0.25 * h * j;
    k.block(n, n, n, n) = -0.25 * h * Matrix::Identity(n, n);

    const Vector step = k.partialPivLu().solve(-res);
    double alpha = 1.0;
    CombinedState trial;
    Vector trial_res;
    double trial_norm = res_norm;
    for (int bt = 0; bt < 30; ++bt) {
      trial.q = w.q + alpha * step.segment(0, n);
      trial.lam = w.lam + alpha * step.segment(n, n);
      trial_res = residual(trial);
      trial_norm = trial_res.lpNorm<Eigen::Infinity>();
      if (trial_norm <= (1.0 - 1e-4 * alpha) * res_norm) break;
      alpha *= 0.5;
    }
    if (trial_norm >= res_norm) break;  // line search exhausted
    w = trial;
    res = trial_res;
    res_norm = trial_norm;
  }
  if (res_norm <= opts.tol) return w;
  std::ostringstream msg;
  msg << who << ": Newton did not converge, residual " << res_norm << " after "
      << opts.max_iter << " iterations";
  throw std::runtime_error(msg.str());
}

} // namespace

CombinedState del_step(const CombinedState& y_prev, const CombinedState& y_curr, double h,
                       const ForceField& force, const NewtonOptions& opts) {
  const CombinedState d2 = discrete_lagrangian_d2(y_prev, y_curr, h, force);
  CombinedState guess;
  guess.q = 2.0 * y_curr.q - y_prev.q;
  guess.lam = 2.0 * y_curr.lam - y_prev.lam;
  return solve_implicit(d2.q, d2.lam, y_curr, guess, h, force, opts, "del_step");
}

PhasePoint momentum_form_step(const PhasePoint& z, double h, const ForceField& force,
                              const NewtonOptions& opts) {
  CombinedState guess;
  guess.q = z.y.q - h * z.p_lam;      // qdot = -p_lam
  guess.lam = z.y.lam - h * z.p_q;    // lamdot = -p_q
  const CombinedState y_next =
      solve_implicit(z.p_q, z.p_lam, z.y, guess, h, force, opts, "momentum_form_step");
  const CombinedState d2 = discrete_lagrangian_d2(z.y, y_next, h, force);
  return PhasePoint{y_next, d2.q, d2.lam};
}

Vector phase_to_vector(const PhasePoint& z) {
  const int n = z.dim();
  Vector out(4 * n);
  out << z.y.q, z.y.lam, z.p_q, z.p_lam;
  return out;
}

PhasePoint phase_from_vector(const Vector& z) {
  const int n = static_cast<int>(z.size()) / 4;
  return PhasePoint{CombinedState{z.segment(0, n), z.segment(n, n)}, z.segment(2 * n, n),
                    z.segment(3 * n, n)};
}

namespace {

Vector hamilton_rhs_flat(const Vector& z, const ForceField& force) {
  const PhaseVelocity v = hamilton_rhs(phase_from_vector(z), force);
  const int n = static_cast<int>(v.pdot_q.size());
  Vector out(4 * n);
  out << v.ydot.qdot, v.ydot.lamdot, v.pdot_q, v.pdot_lam;
  return out;
}

Vector rk4_step_flat(const Vector& z, double h, const ForceField& force) {
  const Vector k1 = hamilton_rhs_flat(z, force);
  const Vector k2 = hamilton_rhs_flat(z + 0.5 * h * k1, force);
  const Vector k3 = hamilton_rhs_flat(z + 0.5 * h * k2, force);
  const Vector k4 = hamilton_rhs_flat(z + h * k3, force);
  return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

DiscreteTrajectory integrate_ivp(const CombinedState& y0, const CombinedVelocity& ydot0,
                                 const Grid& grid, const ForceField& force, Method method,
                                 const NewtonOptions& opts) {
  DiscreteTrajectory traj;
  traj.grid = grid;
  traj.nodes.reserve(grid.steps + 1);
  traj.nodes.push_back(legendre(y0, ydot0));
  const double h = grid.h();
  for (int k = 0; k < grid.steps; ++k) {
    PhasePoint next;
    if (method == Method::Variational) {
      next = momentum_form_step(traj.nodes.back(), h, force, opts);
    } else {
      next = phase_from_vector(rk4_step_flat(phase_to_vector(traj.nodes.back()), h, force));
    }
    if (!phase_to_vector(next).allFinite()) {
      std::ostringstream msg;
      msg << "integrate_ivp: non-finite state at node " << (k + 1);
      throw std::runtime_error(msg.str());
    }
    traj.nodes.push_back(std::move(next));
  }
  return traj;
}

double del_residual(const DiscreteTrajectory& traj, const ForceField& force) {
  const int count = static_cast<int>(traj.nodes.size());
  if (count < 3)
    throw std::invalid_argument("del_residual: needs at least 3 nodes");
  const double h = traj.grid.h();
  double worst = 0.0;
  for (int k = 1; k + 1 < count; ++k) {
    const CombinedState d2 = discrete_lagrangian_d2(traj.nodes[k - 1].y, traj.nodes[k].y, h, force);
    const CombinedState d1 = discrete_lagrangian_d1(traj.nodes[k].y, traj.nodes[k + 1].y, h, force);
    const double r = std::max((d2.q + d1.q).lpNorm<Eigen::Infinity>(),
                              (d2.lam + d1.lam).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, r);
  }
  return worst;
}

} // namespace costate
