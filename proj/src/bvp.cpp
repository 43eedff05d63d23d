#include "costate/bvp.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace costate {

Vector terminal_residual(const DiscreteTrajectory& traj, const TerminalCost& phi) {
  if (traj.nodes.empty()) throw std::invalid_argument("terminal_residual: empty trajectory");
  const auto [y, ydot] = legendre_inverse(traj.nodes.back());
  const int n = y.dim();
  Vector r(2 * n);
  r.segment(0, n) = phi.grad_q(y.q, ydot.qdot) - ydot.lamdot;
  r.segment(n, n) = phi.grad_v(y.q, ydot.qdot) + y.lam;
  return r;
}

double objective_of(const DiscreteTrajectory& traj, const TerminalCost& phi) {
  if (traj.nodes.empty()) throw std::invalid_argument("objective_of: empty trajectory");
  const double h = traj.grid.h();
  double running = 0.0;
  const int last = static_cast<int>(traj.nodes.size()) - 1;
  for (int k = 0; k <= last; ++k) {
    const double w = (k == 0 || k == last) ? 0.5 : 1.0;
    running += w * 0.5 * traj.nodes[k].y.lam.squaredNorm();
  }
  const auto [y, ydot] = legendre_inverse(traj.nodes.back());
  return phi.value(y.q, ydot.qdot) + h * running;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

ShootingResult shoot(const Problem& problem, const Grid& grid, const ShootingUnknown& guess,
                     const ShootingOptions& opts) {
  problem.validate();
  const int n = problem.dim();
  if (guess.lam0.size() != n || guess.lamdot0.size() != n)
    throw std::invalid_argument("shoot: guess dimension disagrees with the problem");

  auto integrate = [&](const Vector& z) {
    const CombinedState y0{problem.q0, z.segment(0, n)};
    const CombinedVelocity ydot0{problem.v0, z.segment(n, n)};
    return integrate_ivp(y0, ydot0, grid, problem.force, opts.method, opts.newton);
  };

  ShootingResult best;
  best.residual_norm = kInf;
  best.converged = false;
  bool best_assigned = false;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int attempts = std::max(1, opts.multistart);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Vector z(2 * n);
    z << guess.lam0, guess.lamdot0;
    if (attempt > 0)
      for (int i = 0; i < 2 * n; ++i) z(i) += attempt * gauss(rng);

    DiscreteTrajectory traj;
    Vector res;
    double res_norm = kInf;
    std::string failure;
    try {
      traj = integrate(z);
      res = terminal_residual(traj, problem.phi);
      res_norm = res.lpNorm<Eigen::Infinity>();
    } catch (const std::exception& e) {
      failure = e.what();
    }

    int iterations = 0;
    while (failure.empty() && res_norm > opts.tol && iterations < opts.max_iter) {
      // Forward-difference sensitivity: exact for the affine residuals of
      // linear force fields, so those converge in a single update.
      Matrix sens(2 * n, 2 * n);
      bool sens_ok = true;
      for (int i = 0; i < 2 * n && sens_ok; ++i) {
        const double delta = opts.fd_increment * std::max(1.0, std::abs(z(i)));
        Vector zp = z;
        zp(i) += delta;
        try {
          sens.col(i) = (terminal_residual(integrate(zp), problem.phi) - res) / delta;
        } catch (const std::exception& e) {
          failure = std::string("sensitivity integration failed: ") + e.what();
          sens_ok = false;
        }
      }
      if (!sens_ok) break;

      const Vector step = sens.partialPivLu().solve(-res);
      if (!step.allFinite()) {
        failure = "singular sensitivity matrix";
        break;
      }

      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
        const Vector z_trial = z + alpha * step;
        try {
          DiscreteTrajectory traj_trial = integrate(z_trial);
          const Vector res_trial = terminal_residual(traj_trial, problem.phi);
          const double norm_trial = res_trial.lpNorm<Eigen::Infinity>();
          if (norm_trial <= (1.0 - 1e-4 * alpha) * res_norm) {
            z = z_trial;
            traj = std::move(traj_trial);
            res = res_trial;
            res_norm = norm_trial;
            accepted = true;
            break;
          }
        } catch (const std::exception&) {
          // blow-up at this trial point; shrink the step
        }
        alpha *= 0.5;
      }
      ++iterations;
      if (!accepted) {
        failure = "line search failed to reduce the terminal residual";
        break;
      }
    }

    ShootingResult result;
    result.unknown = ShootingUnknown{z.segment(0, n), z.segment(n, n)};
    result.trajectory = traj;
    result.residual_norm = res_norm;
    result.iterations = iterations;
    result.converged = failure.empty() && res_norm <= opts.tol;
    if (result.converged) {
      result.objective = objective_of(traj, problem.phi);
      result.message = "converged";
      return result;
    }
    if (!failure.empty()) {
      result.message = failure;
    } else {
      std::ostringstream msg;
      msg << "no convergence in " << opts.max_iter << " iterations, residual " << res_norm;
      result.message = msg.str();
    }
    if (!traj.nodes.empty()) result.objective = objective_of(traj, problem.phi);
    if (!best_assigned || result.residual_norm < best.residual_norm) {
      best = result;
      best_assigned = true;
    }
  }
  return best;
}

} // namespace costate
