#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "costate/integrator.hpp"

using namespace costate;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Vector random_vec(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

ForceField free_field() { return linear_force(Matrix::Zero(1, 1)); }

// flattened [q_a; lam_a; q_b; lam_b] view of the two-slot discrete lagrangian,
// for finite-difference checks of the analytic slot gradients
double ld_flat(const Vector& z, int n, double h, const ForceField& f) {
  CombinedState a{z.segment(0, n), z.segment(n, n)};
  CombinedState b{z.segment(2 * n, n), z.segment(3 * n, n)};
  return discrete_lagrangian(a, b, h, f);
}

} // namespace

TEST_CASE("grid arithmetic and validation") {
  Grid g(2.0, 8);
  CHECK(g.h() == doctest::Approx(0.25));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(8) == 2.0);  // exact, not 8 * 0.25 accumulated
  CHECK(g.node(3) == doctest::Approx(0.75));
  CHECK_THROWS_AS(Grid(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 10), std::invalid_argument);
}

TEST_CASE("discrete lagrangian: midpoint quadrature values") {
  ForceField spring = spring_force(1, 1.0);

  CombinedState a{vec({0.7}), vec({0.0})};
  CHECK(discrete_lagrangian(a, a, 1.0, spring) == doctest::Approx(0.0));

  CombinedState b{vec({0.0}), vec({0.0})};
  CombinedState c{vec({1.0}), vec({0.0})};
  CHECK(discrete_lagrangian(b, c, 1.0, spring) == doctest::Approx(0.0));

  CombinedState d{vec({0.0}), vec({2.0})};
  // lamdot = 2, qdot = 0, lam_mid = 1, f(q_mid = 0) = 0: h * (-0 - 0 - 1/2)
  CHECK(discrete_lagrangian(b, d, 1.0, spring) == doctest::Approx(-0.5));
}

TEST_CASE("slot gradients match finite differences") {
  std::mt19937_64 rng(61);
  ForceField dw = doublewell_force(2);
  const double h = 0.2, fd = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    Vector z = random_vec(8, rng);
    CombinedState a{z.segment(0, 2), z.segment(2, 2)};
    CombinedState b{z.segment(4, 2), z.segment(6, 2)};
    CombinedState d1 = discrete_lagrangian_d1(a, b, h, dw);
    CombinedState d2 = discrete_lagrangian_d2(a, b, h, dw);
    Vector analytic(8);
    analytic << d1.q, d1.lam, d2.q, d2.lam;
    for (int i = 0; i < 8; ++i) {
      Vector e = Vector::Zero(8);
      e(i) = 1.0;
      const double diff =
          (ld_flat(z + fd * e, 2, h, dw) - ld_flat(z - fd * e, 2, h, dw)) / (2 * fd);
      CHECK(std::abs(diff - analytic(i)) <= 1e-8);
    }
  }
}

TEST_CASE("del step: zero-adjoint branch and the free-particle solve") {
  ForceField spring = spring_force(1, 1.0);
  CombinedState prev{vec({0.2}), vec({0.0})};
  CombinedState curr{vec({0.4}), vec({0.0})};
  CombinedState next = del_step(prev, curr, 0.1, spring);
  CHECK(next.lam.norm() <= 1e-12);  // lam = 0 is invariant

  // f = 0, h = 1: the lam-row gives the zero second difference
  // lam_next = 2 lam_curr - lam_prev, and the q-row couples in the midpoint
  // controls: q_next = 2 q_curr - q_prev + (lam_mid(prev,curr) + lam_mid(curr,next)) / 2.
  // From (0,0), (1,1): lam_next = 2; q_next = 2 + (1/2 + 3/2)/2 = 3. This is
  // also the exact flow of qdd = lam, lamdd = 0 through those two nodes.
  CombinedState y0{vec({0.0}), vec({0.0})};
  CombinedState y1{vec({1.0}), vec({1.0})};
  CombinedState y2 = del_step(y0, y1, 1.0, free_field());
  CHECK(y2.q(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(y2.lam(0) == doctest::Approx(2.0).epsilon(1e-12));

  // the accepted step satisfies the stationarity equation it solves
  CombinedState d2 = discrete_lagrangian_d2(y0, y1, 1.0, free_field());
  CombinedState d1 = discrete_lagrangian_d1(y1, y2, 1.0, free_field());
  CHECK((d2.q + d1.q).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((d2.lam + d1.lam).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("momentum form step: fixed point and discrete legendre relations") {
  ForceField spring = spring_force(1, 1.0);
  PhasePoint rest{CombinedState{vec({0.0}), vec({0.0})}, vec({0.0}), vec({0.0})};
  PhasePoint stepped = momentum_form_step(rest, 0.1, spring);
  CHECK(stepped.y.q.norm() <= 1e-13);
  CHECK(stepped.y.lam.norm() <= 1e-13);
  CHECK(stepped.p_q.norm() <= 1e-13);
  CHECK(stepped.p_lam.norm() <= 1e-13);

  // p_next = D2 L_d at the accepted pair; -p = D1 L_d at the accepted pair
  std::mt19937_64 rng(67);
  ForceField dw = doublewell_force(2);
  for (int trial = 0; trial < 10; ++trial) {
    PhasePoint z{CombinedState{random_vec(2, rng), random_vec(2, rng)}, random_vec(2, rng),
                 random_vec(2, rng)};
    PhasePoint next = momentum_form_step(z, 0.05, dw);
    CombinedState d1 = discrete_lagrangian_d1(z.y, next.y, 0.05, dw);
    CombinedState d2 = discrete_lagrangian_d2(z.y, next.y, 0.05, dw);
    CHECK((z.p_q + d1.q).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((z.p_lam + d1.lam).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((next.p_q - d2.q).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((next.p_lam - d2.lam).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("one variational step tracks the reference integrator to local order") {
  ForceField spring = spring_force(1, 1.0);
  CombinedState y0{vec({1.0}), vec({0.0})};
  CombinedVelocity ydot0{vec({0.0}), vec({0.0})};
  Grid one_step(0.1, 1);
  auto var = integrate_ivp(y0, ydot0, one_step, spring, Method::Variational);
  auto rk4 = integrate_ivp(y0, ydot0, one_step, spring, Method::Rk4);
  const double q_diff = std::abs(var.nodes[1].y.q(0) - rk4.nodes[1].y.q(0));
  const double full_diff =
      (phase_to_vector(var.nodes[1]) - phase_to_vector(rk4.nodes[1])).cwiseAbs().maxCoeff();
  CHECK(q_diff <= 2e-5);     // measured 8.3e-6
  CHECK(full_diff <= 2e-4);  // O(h^3) local gap at h = 0.1; measured 8.3e-5
  CHECK(full_diff > 0.0);
}

TEST_CASE("ivp integration: exactness classes and analytic benchmarks") {
  // qdd = c with constant adjoint: quadratic flow, exact for both methods
  const double c = 0.3, q0 = 0.5, v0 = -0.2;
  CombinedState y0{vec({q0}), vec({c})};
  CombinedVelocity ydot0{vec({v0}), vec({0.0})};
  Grid grid(2.0, 40);
  for (Method m : {Method::Variational, Method::Rk4}) {
    auto traj = integrate_ivp(y0, ydot0, grid, free_field(), m);
    REQUIRE(static_cast<int>(traj.nodes.size()) == 41);
    for (int k = 0; k <= grid.steps; ++k) {
      const double t = grid.node(k);
      CHECK(std::abs(traj.nodes[k].y.q(0) - (q0 + v0 * t + 0.5 * c * t * t)) <= 1e-12);
      CHECK(std::abs(traj.nodes[k].y.lam(0) - c) <= 1e-12);
    }
  }

  // uncontrolled oscillator: rk4 reference accuracy at N = 1000
  ForceField spring = spring_force(1, 1.0);
  CombinedState osc{vec({1.0}), vec({0.0})};
  CombinedVelocity oscdot{vec({0.0}), vec({0.0})};
  Grid fine(2 * M_PI, 1000);
  auto traj = integrate_ivp(osc, oscdot, fine, spring, Method::Rk4);
  double err = 0.0;
  for (int k = 0; k <= fine.steps; ++k)
    err = std::max(err, std::abs(traj.nodes[k].y.q(0) - std::cos(fine.node(k))));
  CHECK(err <= 1e-6);  // measured 6.3e-11

  // first node is the initial data exactly, momenta from the legendre map
  auto var = integrate_ivp(osc, oscdot, Grid(1.0, 10), spring, Method::Variational);
  CHECK((var.nodes[0].y.q - osc.q).norm() == 0.0);
  CHECK((var.nodes[0].y.lam - osc.lam).norm() == 0.0);
  CHECK((var.nodes[0].p_q + oscdot.lamdot).norm() == 0.0);
  CHECK((var.nodes[0].p_lam + oscdot.qdot).norm() == 0.0);

  // control accessor reads the lambda component
  CHECK(var.control(3) == var.nodes[3].y.lam);

  // non-finite initial data surfaces as an integration error
  CombinedState bad{vec({std::nan("")}), vec({0.0})};
  CHECK_THROWS_AS(integrate_ivp(bad, oscdot, Grid(1.0, 10), spring, Method::Rk4),
                  std::runtime_error);
}

TEST_CASE("del residual separates variational from reference trajectories") {
  ForceField dw = doublewell_force(1);
  CombinedState y0{vec({0.4}), vec({0.3})};
  CombinedVelocity ydot0{vec({0.0}), vec({-0.2})};
  Grid grid(2.0, 50);

  auto var = integrate_ivp(y0, ydot0, grid, dw, Method::Variational);
  auto rk4 = integrate_ivp(y0, ydot0, grid, dw, Method::Rk4);
  CHECK(del_residual(var, dw) <= 1e-10);   // measured 8.8e-13
  CHECK(del_residual(rk4, dw) >= 1e-8);    // measured 4.8e-5: not a stationary chain

  // constant equilibrium chain has exactly zero residual
  ForceField spring = spring_force(1, 1.0);
  CombinedState origin{vec({0.0}), vec({0.0})};
  CombinedVelocity still{vec({0.0}), vec({0.0})};
  auto flat = integrate_ivp(origin, still, Grid(1.0, 5), spring, Method::Variational);
  CHECK(del_residual(flat, spring) == 0.0);

  auto two_nodes = integrate_ivp(origin, still, Grid(1.0, 1), spring, Method::Variational);
  CHECK_THROWS_AS((void)del_residual(two_nodes, spring), std::invalid_argument);
}

TEST_CASE("phase coordinates round-trip through the flat layout") {
  std::mt19937_64 rng(71);
  PhasePoint z{CombinedState{random_vec(3, rng), random_vec(3, rng)}, random_vec(3, rng),
               random_vec(3, rng)};
  Vector flat = phase_to_vector(z);
  REQUIRE(flat.size() == 12);
  CHECK((flat.segment(0, 3) - z.y.q).norm() == 0.0);
  CHECK((flat.segment(3, 3) - z.y.lam).norm() == 0.0);
  CHECK((flat.segment(6, 3) - z.p_q).norm() == 0.0);
  CHECK((flat.segment(9, 3) - z.p_lam).norm() == 0.0);
  PhasePoint back = phase_from_vector(flat);
  CHECK((phase_to_vector(back) - flat).norm() == 0.0);
}
