#include "costate/direct.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace costate {

ControlGrid ControlGrid::zeros(const Grid& grid, int n) {
  ControlGrid c;
  c.grid = grid;
  c.u.assign(grid.steps, Vector::Zero(n));
  return c;
}

namespace {

// State rhs of the plain control system, x = [q; v].
Vector state_rhs(const Vector& x, const Vector& u, const ForceField& force) {
  const int n = force.dim;
  Vector out(2 * n);
  out.segment(0, n) = x.segment(n, n);
  out.segment(n, n) = force.eval(x.segment(0, n)) + u;
  return out;
}

Vector rk4_state_step(const Vector& x, const Vector& u, double h, const ForceField& force) {
  const Vector k1 = state_rhs(x, u, force);
  const Vector k2 = state_rhs(x + 0.5 * h * k1, u, force);
  const Vector k3 = state_rhs(x + 0.5 * h * k2, u, force);
  const Vector k4 = state_rhs(x + h * k3, u, force);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector flatten(const ControlGrid& c) {
  const int n = c.dim();
  Vector z(static_cast<int>(c.u.size()) * n);
  for (size_t k = 0; k < c.u.size(); ++k) z.segment(static_cast<int>(k) * n, n) = c.u[k];
  return z;
}

ControlGrid unflatten(const Vector& z, const Grid& grid, int n) {
  ControlGrid c;
  c.grid = grid;
  c.u.resize(grid.steps);
  for (int k = 0; k < grid.steps; ++k) c.u[k] = z.segment(k * n, n);
  return c;
}

} // namespace

StateTrajectory simulate_state(const Problem& problem, const ControlGrid& controls) {
  const int n = problem.dim();
  if (static_cast<int>(controls.u.size()) != controls.grid.steps)
    throw std::invalid_argument("simulate_state: control count disagrees with the grid");
  const double h = controls.grid.h();
  StateTrajectory out;
  out.grid = controls.grid;
  out.q.reserve(controls.grid.steps + 1);
  out.v.reserve(controls.grid.steps + 1);
  Vector x(2 * n);
  x << problem.q0, problem.v0;
  out.q.push_back(problem.q0);
  out.v.push_back(problem.v0);
  for (int k = 0; k < controls.grid.steps; ++k) {
    x = rk4_state_step(x, controls.u[k], h, problem.force);
    if (!x.allFinite())
      throw std::runtime_error("simulate_state: non-finite state at node " + std::to_string(k + 1));
    out.q.push_back(x.segment(0, n));
    out.v.push_back(x.segment(n, n));
  }
  return out;
}

double discrete_objective(const Problem& problem, const ControlGrid& controls) {
  const StateTrajectory traj = simulate_state(problem, controls);
  const double h = controls.grid.h();
  double cost = problem.phi.value(traj.q.back(), traj.v.back());
  for (const Vector& u : controls.u) cost += 0.5 * h * u.squaredNorm();
  return cost;
}

Vector objective_gradient_fd(const Problem& problem, const ControlGrid& controls,
                             double increment) {
  const int n = problem.dim();
  Vector z = flatten(controls);
  Vector grad(z.size());
  for (int i = 0; i < z.size(); ++i) {
    const double delta = increment * std::max(1.0, std::abs(z(i)));
    Vector zp = z, zm = z;
    zp(i) += delta;
    zm(i) -= delta;
    grad(i) = (discrete_objective(problem, unflatten(zp, controls.grid, n)) -
               discrete_objective(problem, unflatten(zm, controls.grid, n))) /
              (2.0 * delta);
  }
  return grad;
}

Vector objective_gradient_adjoint(const Problem& problem, const ControlGrid& controls) {
  const int n = problem.dim();
  const int steps = controls.grid.steps;
  const double h = controls.grid.h();
  const StateTrajectory traj = simulate_state(problem, controls);

  auto a_of = [&](const Vector& x) {
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.block(0, n, n, n) = Matrix::Identity(n, n);
    a.block(n, 0, n, n) = problem.force.jacobian(x.segment(0, n));
    return a;
  };
  Matrix b = Matrix::Zero(2 * n, n);
  b.block(n, 0, n, n) = Matrix::Identity(n, n);

  Vector mu(2 * n);
  mu << problem.phi.grad_q(traj.q.back(), traj.v.back()),
      problem.phi.grad_v(traj.q.back(), traj.v.back());

  Vector grad(steps * n);
  const Matrix id = Matrix::Identity(2 * n, 2 * n);
  for (int k = steps - 1; k >= 0; --k) {
    Vector x(2 * n);
    x << traj.q[k], traj.v[k];
    const Vector& u = controls.u[k];

    // Recreate the four stages, then chain their sensitivities.
    const Vector k1 = state_rhs(x, u, problem.force);
    const Vector s2 = x + 0.5 * h * k1;
    const Vector k2 = state_rhs(s2, u, problem.force);
    const Vector s3 = x + 0.5 * h * k2;
    const Vector k3 = state_rhs(s3, u, problem.force);
    const Vector s4 = x + h * k3;

    const Matrix a1 = a_of(x), a2 = a_of(s2), a3 = a_of(s3), a4 = a_of(s4);
    const Matrix dk1_dx = a1;
    const Matrix dk2_dx = a2 * (id + 0.5 * h * dk1_dx);
    const Matrix dk3_dx = a3 * (id + 0.5 * h * dk2_dx);
    const Matrix dk4_dx = a4 * (id + h * dk3_dx);
    const Matrix dstep_dx = id + h / 6.0 * (dk1_dx + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);

    const Matrix dk1_du = b;
    const Matrix dk2_du = a2 * (0.5 * h * dk1_du) + b;
    const Matrix dk3_du = a3 * (0.5 * h * dk2_du) + b;
    const Matrix dk4_du = a4 * (h * dk3_du) + b;
    const Matrix dstep_du = h / 6.0 * (dk1_du + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);

    grad.segment(k * n, n) = h * u + dstep_du.transpose() * mu;
    mu = dstep_dx.transpose() * mu;
  }
  return grad;
}

DirectResult optimize(const Problem& problem, const Grid& grid, const ControlGrid& init,
                      const DirectOptions& opts) {
  problem.validate();
  const int n = problem.dim();
  ControlGrid start = init.u.empty() ? ControlGrid::zeros(grid, n) : init;
  if (start.grid.steps != grid.steps ||
      static_cast<int>(start.u.size()) != grid.steps || start.dim() != n)
    throw std::invalid_argument("optimize: initial controls disagree with the grid");

  auto value_of = [&](const Vector& z) {
    return discrete_objective(problem, unflatten(z, grid, n));
  };
  auto gradient_of = [&](const Vector& z) {
    const ControlGrid c = unflatten(z, grid, n);
    return opts.adjoint_gradient ? objective_gradient_adjoint(problem, c)
                                 : objective_gradient_fd(problem, c, opts.fd_increment);
  };

  Vector z = flatten(start);
  double value = value_of(z);
  Vector grad = gradient_of(z);

  std::deque<Vector> s_hist, y_hist;
  DirectResult result;
  result.objective_history.push_back(value);

  int iterations = 0;
  bool converged = grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol;
  while (!converged && iterations < opts.max_iter) {
    // Two-loop recursion for the L-BFGS direction.
    Vector d = -grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      alpha[i] = rho * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      d *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      const double beta = rho * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }

    double slope = grad.dot(d);
    if (slope >= 0.0) {  // not a descent direction; fall back to steepest descent
      d = -grad;
      slope = grad.dot(d);
    }

    double step = 1.0;
    double trial_value = value;
    Vector z_trial;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      z_trial = z + step * d;
      trial_value = value_of(z_trial);
      if (trial_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    if (!accepted) break;

    const Vector grad_trial = gradient_of(z_trial);
    const Vector s = z_trial - z;
    const Vector y = grad_trial - grad;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    z = z_trial;
    value = trial_value;
    grad = grad_trial;
    result.objective_history.push_back(value);
    converged = grad.lpNorm<Eigen::Infinity>() <= opts.grad_tol;
  }

  result.controls = unflatten(z, grid, n);
  result.states = simulate_state(problem, result.controls);
  result.objective = value;
  result.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

} // namespace costate
