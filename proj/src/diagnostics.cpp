#include "costate/diagnostics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace costate {

namespace {

void require_skew(const Matrix& xi) {
  if (xi.rows() != xi.cols())
    throw std::invalid_argument("symmetry generator must be square");
  if ((xi + xi.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("symmetry generator must be skew-symmetric");
}

} // namespace

SymmetryGenerator SymmetryGenerator::rotation(int n, int axis_i, int axis_j) {
  if (axis_i < 0 || axis_j < 0 || axis_i >= n || axis_j >= n || axis_i == axis_j)
    throw std::invalid_argument("rotation generator: invalid axis pair");
  Matrix xi = Matrix::Zero(n, n);
  xi(axis_j, axis_i) = 1.0;
  xi(axis_i, axis_j) = -1.0;
  return SymmetryGenerator{xi};
}

SymmetryGenerator SymmetryGenerator::so3_axis(const Vector& axis) {
  if (axis.size() != 3) throw std::invalid_argument("so3 generator: axis must be in R^3");
  const double norm = axis.norm();
  if (norm < 1e-12) throw std::invalid_argument("so3 generator: axis must be nonzero");
  const Vector n = axis / norm;
  Matrix xi(3, 3);
  xi << 0, -n(2), n(1), n(2), 0, -n(0), -n(1), n(0), 0;
  return SymmetryGenerator{xi};
}

double noether_momentum(const PhasePoint& z, const SymmetryGenerator& gen) {
  require_skew(gen.xi);
  if (gen.xi.rows() != z.dim())
    throw std::invalid_argument("noether_momentum: generator dimension mismatch");
  return z.p_q.dot(gen.xi * z.y.q) + z.p_lam.dot(gen.xi * z.y.lam);
}

namespace {

DriftReport drift_of(const DiscreteTrajectory& traj,
                     const std::function<double(const PhasePoint&)>& observable) {
  if (traj.nodes.empty()) throw std::invalid_argument("drift report: empty trajectory");
  DriftReport report;
  report.values.reserve(traj.nodes.size());
  for (const PhasePoint& z : traj.nodes) report.values.push_back(observable(z));
  report.initial = report.values.front();
  for (double v : report.values)
    report.max_drift = std::max(report.max_drift, std::abs(v - report.initial));
  return report;
}

} // namespace

DriftReport hamiltonian_drift(const DiscreteTrajectory& traj, const ForceField& force) {
  return drift_of(traj, [&force](const PhasePoint& z) { return new_hamiltonian(z, force); });
}

DriftReport noether_drift(const DiscreteTrajectory& traj, const SymmetryGenerator& gen) {
  return drift_of(traj, [&gen](const PhasePoint& z) { return noether_momentum(z, gen); });
}

double lagrangian_invariance_check(const ForceField& force, const Matrix& generator,
                                   int trials, unsigned seed, double scale) {
  require_skew(generator);
  const int n = force.dim;
  if (generator.rows() != n)
    throw std::invalid_argument("lagrangian_invariance_check: generator dimension mismatch");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  auto draw = [&](Vector& x) {
    x.resize(n);
    for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    CombinedState y;
    CombinedVelocity ydot;
    draw(y.q);
    draw(y.lam);
    draw(ydot.qdot);
    draw(ydot.lamdot);
    if (force.name == "central" && y.q.norm() < 0.5) y.q += Vector::Ones(n);

    const Matrix rot = matrix_exponential(angle(rng) * generator);
    const Matrix g = scale * rot;
    const Matrix g_inv_t = rot / scale;  // (g^{-1})^T for g = scale * orthogonal

    const CombinedState y2{g * y.q, g_inv_t * y.lam};
    const CombinedVelocity ydot2{g * ydot.qdot, g_inv_t * ydot.lamdot};
    const double before = new_lagrangian(y, ydot, force);
    const double after = new_lagrangian(y2, ydot2, force);
    worst = std::max(worst, std::abs(after - before) / (1.0 + std::abs(before)));
  }
  return worst;
}

StepMap variational_step_map(const ForceField& force, const NewtonOptions& newton) {
  return [force, newton](const PhasePoint& z, double h) {
    return momentum_form_step(z, h, force, newton);
  };
}

namespace {

Vector rhs_flat(const Vector& z, const ForceField& force) {
  const PhaseVelocity v = hamilton_rhs(phase_from_vector(z), force);
  const int n = static_cast<int>(v.pdot_q.size());
  Vector out(4 * n);
  out << v.ydot.qdot, v.ydot.lamdot, v.pdot_q, v.pdot_lam;
  return out;
}

} // namespace

StepMap rk4_step_map(const ForceField& force) {
  return [force](const PhasePoint& z, double h) {
    const Vector z0 = phase_to_vector(z);
    const Vector k1 = rhs_flat(z0, force);
    const Vector k2 = rhs_flat(z0 + 0.5 * h * k1, force);
    const Vector k3 = rhs_flat(z0 + 0.5 * h * k2, force);
    const Vector k4 = rhs_flat(z0 + h * k3, force);
    return phase_from_vector(z0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
}

StepMap explicit_euler_step_map(const ForceField& force) {
  return [force](const PhasePoint& z, double h) {
    const Vector z0 = phase_to_vector(z);
    return phase_from_vector(z0 + h * rhs_flat(z0, force));
  };
}

double symplecticity_defect(const StepMap& step, const PhasePoint& probe, double h,
                            double fd_increment) {
  const int n = probe.dim();
  const int m = 4 * n;
  const Vector z0 = phase_to_vector(probe);
  Matrix jac(m, m);
  for (int i = 0; i < m; ++i) {
    Vector zp = z0, zm = z0;
    zp(i) += fd_increment;
    zm(i) -= fd_increment;
    jac.col(i) = (phase_to_vector(step(phase_from_vector(zp), h)) -
                  phase_to_vector(step(phase_from_vector(zm), h))) /
                 (2.0 * fd_increment);
  }
  Matrix omega = Matrix::Zero(m, m);
  omega.block(0, 2 * n, 2 * n, 2 * n) = Matrix::Identity(2 * n, 2 * n);
  omega.block(2 * n, 0, 2 * n, 2 * n) = -Matrix::Identity(2 * n, 2 * n);
  return (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
}

PMPResidualReport pmp_residual_along(const DiscreteTrajectory& traj, const ForceField& force) {
  const int count = static_cast<int>(traj.nodes.size());
  if (count < 5)
    throw std::invalid_argument("pmp_residual_along: needs at least 5 nodes");
  const double h = traj.grid.h();

  // Node-wise PMP tuples: v and lam_q come from momenta, u from the
  // optimality condition.
  std::vector<PMPPoint> pts(count);
  for (int k = 0; k < count; ++k) {
    const PhasePoint& z = traj.nodes[k];
    pts[k] = PMPPoint{z.y.q, -z.p_lam, z.p_q, z.y.lam, z.y.lam};
  }

  // Second-order time differences, one-sided at the boundary nodes.
  auto diff = [&](auto&& get, int k) -> Vector {
    if (k == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
    if (k == count - 1)
      return (3.0 * get(count - 1) - 4.0 * get(count - 2) + get(count - 3)) / (2.0 * h);
    return (get(k + 1) - get(k - 1)) / (2.0 * h);
  };

  PMPResidualReport report;
  report.per_node.reserve(count);
  for (int k = 0; k < count; ++k) {
    PMPDerivatives d;
    d.qdot = diff([&](int i) { return pts[i].q; }, k);
    d.vdot = diff([&](int i) { return pts[i].v; }, k);
    d.lamdot_q = diff([&](int i) { return pts[i].lam_q; }, k);
    d.lamdot_v = diff([&](int i) { return pts[i].lam_v; }, k);
    const double r = pmp_residual(pts[k], d, force).lpNorm<Eigen::Infinity>();
    report.per_node.push_back(r);
    report.max_residual = std::max(report.max_residual, r);
  }
  return report;
}

Matrix matrix_exponential(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exponential: square input only");
  int squarings = 0;
  Matrix scaled = a;
  while (scaled.cwiseAbs().rowwise().sum().maxCoeff() > 0.5) {
    scaled *= 0.5;
    if (++squarings > 100) throw std::invalid_argument("matrix_exponential: norm too large");
  }
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = result;
  for (int k = 1; k <= 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

} // namespace costate
