#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <stdexcept>

#include "costate/model.hpp"

using namespace costate;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// 5-point central stencil, O(h^4) truncation.
Matrix fd_jacobian(const ForceField& f, const Vector& q, double h) {
  const int n = f.dim;
  Matrix j(n, n);
  for (int c = 0; c < n; ++c) {
    Vector e = Vector::Zero(n);
    e(c) = 1.0;
    j.col(c) = (-f.eval(q + 2 * h * e) + 8 * f.eval(q + h * e) - 8 * f.eval(q - h * e) +
                f.eval(q - 2 * h * e)) /
               (12 * h);
  }
  return j;
}

double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
}

ProblemParams spring_params() {
  ProblemParams p;
  p.n = 1;
  p.stiffness = 1.0;
  p.q0 = vec({0.0});
  p.v0 = vec({0.0});
  p.horizon = 1.0;
  return p;
}

} // namespace

TEST_CASE("spring field: values, jacobian, tag") {
  ForceField f = spring_force(1, 1.0);
  CHECK(f.dim == 1);
  CHECK(f.tag == EquivarianceTag::OrthogonalGroup);
  CHECK(f.eval(vec({2.0}))(0) == doctest::Approx(-2.0));

  ForceField f3 = spring_force(3, 2.5);
  const Vector q = vec({0.3, -1.2, 0.4});
  CHECK((f3.eval(q) + 2.5 * q).norm() <= 1e-15);
  CHECK((f3.jacobian(q) + 2.5 * Matrix::Identity(3, 3)).norm() <= 1e-15);
}

TEST_CASE("central field: inverse-square pull, singularity guard") {
  ForceField f = central_force(1.0);
  CHECK(f.dim == 3);
  CHECK(f.tag == EquivarianceTag::Rotation3d);
  CHECK((f.eval(vec({1.0, 0.0, 0.0})) - vec({-1.0, 0.0, 0.0})).norm() <= 1e-15);
  // |q| = 2: f = -q / 8
  CHECK((f.eval(vec({0.0, 2.0, 0.0})) - vec({0.0, -0.25, 0.0})).norm() <= 1e-15);
  CHECK_THROWS_AS((void)f.eval(vec({0.0, 0.0, 0.0})), std::domain_error);
  CHECK_THROWS_AS((void)f.jacobian(vec({1e-12, 0.0, 0.0})), std::domain_error);
}

TEST_CASE("doublewell field: roots at the wells, componentwise cubic") {
  ForceField f = doublewell_force(2);
  CHECK(f.tag == EquivarianceTag::None);
  CHECK(f.eval(vec({1.0, -1.0})).norm() <= 1e-15);
  CHECK(f.eval(vec({0.5, 0.0}))(0) == doctest::Approx(0.375));
  CHECK(f.jacobian(vec({0.0, 1.0}))(0, 0) == doctest::Approx(1.0));
  CHECK(f.jacobian(vec({0.0, 1.0}))(1, 1) == doctest::Approx(-2.0));
  CHECK(f.jacobian(vec({0.0, 1.0}))(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("linear field multiplies by its matrix") {
  Matrix a(2, 2);
  a << -1.0, 0.5, 0.5, -2.0;
  ForceField f = linear_force(a);
  CHECK(f.tag == EquivarianceTag::None);
  const Vector q = vec({0.7, -0.2});
  CHECK((f.eval(q) - a * q).norm() <= 1e-15);
  CHECK((f.jacobian(q) - a).norm() <= 1e-15);
  CHECK_THROWS_AS(linear_force(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("analytic jacobians agree with 5-point differences") {
  Matrix a(2, 2);
  a << 0.3, -1.1, 0.8, 0.2;
  const ForceField fields[] = {spring_force(2, 1.7), central_force(1.3), doublewell_force(3),
                               linear_force(a)};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (const ForceField& f : fields) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector q(f.dim);
      do {
        for (int i = 0; i < f.dim; ++i) q(i) = coord(rng);
      } while (f.name == "central" && q.norm() < 0.3);
      CHECK(rel_err(fd_jacobian(f, q, 1e-3), f.jacobian(q)) <= 1e-6);
    }
  }
}

TEST_CASE("terminal cost: value formula and gradients") {
  TerminalCost phi;
  phi.w_q = 2.0;
  phi.w_v = 0.5;
  phi.q_target = vec({1.0, 0.0});
  phi.v_target = vec({0.0, -1.0});

  const Vector q = vec({0.4, 0.3});
  const Vector v = vec({-0.2, 0.1});
  const double expect =
      0.5 * 2.0 * ((0.4 - 1.0) * (0.4 - 1.0) + 0.09) + 0.5 * 0.5 * (0.04 + 1.21);
  CHECK(phi.value(q, v) == doctest::Approx(expect));
  CHECK(phi.value(phi.q_target, phi.v_target) == doctest::Approx(0.0));

  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vector e = Vector::Zero(2);
    e(i) = 1.0;
    const double dq = (phi.value(q + h * e, v) - phi.value(q - h * e, v)) / (2 * h);
    const double dv = (phi.value(q, v + h * e) - phi.value(q, v - h * e)) / (2 * h);
    CHECK(std::abs(dq - phi.grad_q(q, v)(i)) / (1.0 + std::abs(dq)) <= 1e-7);
    CHECK(std::abs(dv - phi.grad_v(q, v)(i)) / (1.0 + std::abs(dv)) <= 1e-7);
  }

  TerminalCost zero;
  zero.q_target = Vector::Zero(2);
  zero.v_target = Vector::Zero(2);
  CHECK(zero.value(q, v) == 0.0);
  CHECK(zero.grad_q(q, v).norm() == 0.0);
}

TEST_CASE("equivariance: tagged fields pass, a mis-tagged field fails") {
  CHECK(check_equivariance(spring_force(4, 1.3), 100, 7) <= 1e-12);
  CHECK(check_equivariance(spring_force(1, 0.6), 100, 9) <= 1e-12);
  CHECK(check_equivariance(central_force(1.0), 100, 11) <= 1e-12);

  ForceField dw = doublewell_force(2);
  dw.tag = EquivarianceTag::OrthogonalGroup;  // deliberately wrong
  CHECK(check_equivariance(dw, 100, 3) > 1e-3);

  CHECK_THROWS_AS(check_equivariance(doublewell_force(1), 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(check_equivariance(linear_force(Matrix::Identity(2, 2)), 10, 0),
                  std::invalid_argument);
}

TEST_CASE("builtin problem registry: wiring and strict parameters") {
  Problem prob = builtin_problem("spring", spring_params());
  CHECK(prob.dim() == 1);
  CHECK(prob.phi.q_target.size() == 1);  // defaulted to zeros
  CHECK(prob.force.eval(vec({2.0}))(0) == doctest::Approx(-2.0));

  // doublewell at q = 1 sits at a well: zero force
  ProblemParams dw;
  dw.n = 1;
  dw.q0 = vec({1.0});
  dw.v0 = vec({0.0});
  CHECK(builtin_problem("doublewell", dw).force.eval(vec({1.0})).norm() <= 1e-15);

  CHECK_THROWS_AS(builtin_problem("pendulum", spring_params()), std::invalid_argument);

  ProblemParams missing = spring_params();
  missing.stiffness.reset();
  CHECK_THROWS_AS(builtin_problem("spring", missing), std::invalid_argument);

  ProblemParams stray = spring_params();
  stray.mu = 1.0;
  CHECK_THROWS_AS(builtin_problem("spring", stray), std::invalid_argument);

  ProblemParams central;
  central.n = 3;
  central.mu = 1.0;
  central.q0 = vec({1.0, 0.0, 0.0});
  central.v0 = vec({0.0, 1.0, 0.0});
  CHECK(builtin_problem("central", central).dim() == 3);

  ProblemParams flat = central;
  flat.n = 2;
  flat.q0 = vec({1.0, 0.0});
  flat.v0 = vec({0.0, 1.0});
  CHECK_THROWS_AS(builtin_problem("central", flat), std::invalid_argument);

  ProblemParams at_origin = central;
  at_origin.q0 = vec({0.0, 0.0, 0.0});
  CHECK_THROWS_AS(builtin_problem("central", at_origin), std::domain_error);

  ProblemParams bad_horizon = spring_params();
  bad_horizon.horizon = 0.0;
  CHECK_THROWS_AS(builtin_problem("spring", bad_horizon), std::invalid_argument);

  ProblemParams negative_weight = spring_params();
  negative_weight.w_q = -1.0;
  CHECK_THROWS_AS(builtin_problem("spring", negative_weight), std::invalid_argument);
}
