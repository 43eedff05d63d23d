#include "costate/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace costate {

ForceField linear_force(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw std::invalid_argument("linear_force: matrix must be square and nonempty");
  ForceField f;
  f.name = "linear";
  f.dim = static_cast<int>(a.rows());
  f.eval = [a](const Vector& q) -> Vector { return a * q; };
  f.jacobian = [a](const Vector&) -> Matrix { return a; };
  f.tag = EquivarianceTag::None;
  return f;
}

ForceField spring_force(int n, double stiffness) {
  if (n < 1) throw std::invalid_argument("spring_force: dimension must be positive");
  ForceField f;
  f.name = "spring";
  f.dim = n;
  f.eval = [stiffness](const Vector& q) -> Vector { return -stiffness * q; };
  f.jacobian = [n, stiffness](const Vector&) -> Matrix {
    return -stiffness * Matrix::Identity(n, n);
  };
  f.tag = EquivarianceTag::OrthogonalGroup;
  return f;
}

ForceField central_force(double mu) {
  ForceField f;
  f.name = "central";
  f.dim = 3;
  f.eval = [mu](const Vector& q) -> Vector {
    const double r = q.norm();
    if (r < 1e-9) throw std::domain_error("central_force: evaluation too close to the origin");
    return -mu / (r * r * r) * q;
  };
  f.jacobian = [mu](const Vector& q) -> Matrix {
    const double r = q.norm();
    if (r < 1e-9) throw std::domain_error("central_force: evaluation too close to the origin");
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    return -mu * (Matrix::Identity(3, 3) / r3 - 3.0 / r5 * (q * q.transpose()));
  };
  f.tag = EquivarianceTag::Rotation3d;
  return f;
}

ForceField doublewell_force(int n) {
  if (n < 1) throw std::invalid_argument("doublewell_force: dimension must be positive");
  ForceField f;
  f.name = "doublewell";
  f.dim = n;
  f.eval = [](const Vector& q) -> Vector {
    return (q.array() - q.array().cube()).matrix();
  };
  f.jacobian = [n](const Vector& q) -> Matrix {
    Matrix j = Matrix::Zero(n, n);
    j.diagonal() = (1.0 - 3.0 * q.array().square()).matrix();
    return j;
  };
  f.tag = EquivarianceTag::None;
  return f;
}

double TerminalCost::value(const Vector& q, const Vector& v) const {
  return 0.5 * w_q * (q - q_target).squaredNorm() + 0.5 * w_v * (v - v_target).squaredNorm();
}

Vector TerminalCost::grad_q(const Vector& q, const Vector&) const {
  return w_q * (q - q_target);
}

Vector TerminalCost::grad_v(const Vector&, const Vector& v) const {
  return w_v * (v - v_target);
}

void Problem::validate() const {
  const int n = force.dim;
  if (n < 1) throw std::invalid_argument("problem: force dimension must be positive");
  if (!force.eval || !force.jacobian)
    throw std::invalid_argument("problem: force field missing eval or jacobian");
  if (q0.size() != n || v0.size() != n)
    throw std::invalid_argument("problem: initial data dimension disagrees with the force field");
  if (phi.q_target.size() != n || phi.v_target.size() != n)
    throw std::invalid_argument("problem: terminal target dimension disagrees with the force field");
  if (phi.w_q < 0.0 || phi.w_v < 0.0)
    throw std::invalid_argument("problem: terminal weights must be nonnegative");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("problem: horizon must be finite and positive");
  if (!q0.allFinite() || !v0.allFinite())
    throw std::invalid_argument("problem: initial data must be finite");
  force.eval(q0);  // surfaces singular initial configurations (central force at the origin)
}

Problem builtin_problem(const std::string& name, const ProblemParams& params) {
  Problem prob;
  if (name == "linear") {
    if (!params.a) throw std::invalid_argument("builtin_problem: linear force needs matrix a");
    if (params.stiffness || params.mu)
      throw std::invalid_argument("builtin_problem: linear force takes no stiffness or mu");
    if (params.a->rows() != params.n)
      throw std::invalid_argument("builtin_problem: matrix a disagrees with dimension n");
    prob.force = linear_force(*params.a);
  } else if (name == "spring") {
    if (!params.stiffness)
      throw std::invalid_argument("builtin_problem: spring force needs stiffness");
    if (params.a || params.mu)
      throw std::invalid_argument("builtin_problem: spring force takes only stiffness");
    prob.force = spring_force(params.n, *params.stiffness);
  } else if (name == "central") {
    if (!params.mu) throw std::invalid_argument("builtin_problem: central force needs mu");
    if (params.a || params.stiffness)
      throw std::invalid_argument("builtin_problem: central force takes only mu");
    if (params.n != 3)
      throw std::invalid_argument("builtin_problem: central force requires n = 3");
    prob.force = central_force(*params.mu);
  } else if (name == "doublewell") {
    if (params.a || params.stiffness || params.mu)
      throw std::invalid_argument("builtin_problem: doublewell force takes no constants");
    prob.force = doublewell_force(params.n);
  } else {
    throw std::invalid_argument("builtin_problem: unknown force name '" + name + "'");
  }
  prob.phi.w_q = params.w_q;
  prob.phi.w_v = params.w_v;
  prob.phi.q_target = params.q_target.size() ? params.q_target : Vector::Zero(params.n);
  prob.phi.v_target = params.v_target.size() ? params.v_target : Vector::Zero(params.n);
  prob.q0 = params.q0;
  prob.v0 = params.v0;
  prob.horizon = params.horizon;
  prob.validate();
  return prob;
}

namespace {

// Haar-ish orthogonal sample: QR of a Gaussian matrix with the R-diagonal
// sign fix so the distribution does not collapse onto a coordinate choice.
Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  return q;
}

Matrix random_rotation3(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  Vector axis(3);
  do {
    axis << gauss(rng), gauss(rng), gauss(rng);
  } while (axis.norm() < 1e-8);
  axis.normalize();
  const double s = angle(rng);
  Matrix hat(3, 3);
  hat << 0, -axis(2), axis(1), axis(2), 0, -axis(0), -axis(1), axis(0), 0;
  // Rodrigues formula
  return Matrix::Identity(3, 3) + std::sin(s) * hat + (1.0 - std::cos(s)) * hat * hat;
}

} // namespace

double check_equivariance(const ForceField& force, int trials, unsigned seed) {
  if (force.tag == EquivarianceTag::None)
    throw std::invalid_argument("check_equivariance: force field carries no symmetry tag");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = force.dim;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector q(n);
    for (int i = 0; i < n; ++i) q(i) = gauss(rng);
    if (force.name == "central" && q.norm() < 0.1) q += Vector::Ones(n);
    const Matrix g = force.tag == EquivarianceTag::Rotation3d ? random_rotation3(rng)
                                                              : random_orthogonal(n, rng);
    const Vector fq = force.eval(q);
    const double viol = (force.eval(g * q) - g * fq).lpNorm<Eigen::Infinity>() /
                        (1.0 + fq.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, viol);
  }
  return worst;
}

} // namespace costate
