#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "costate/bvp.hpp"
#include "costate/diagnostics.hpp"

using namespace costate;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// q0 = v0 = 0, k = 1, T = pi, unit weights, targets (1, 0). The stationarity
// system qdd = -q + lam, lamdd = -lam with these boundary rows has the
// closed-form solution lam(t) = B sin t, B = 2 / (2 + pi), and cost
// J = 1 / (2 + pi).
Problem spring_regression() {
  ProblemParams p;
  p.n = 1;
  p.stiffness = 1.0;
  p.q0 = vec({0.0});
  p.v0 = vec({0.0});
  p.horizon = M_PI;
  p.w_q = 1.0;
  p.w_v = 1.0;
  p.q_target = vec({1.0});
  p.v_target = vec({0.0});
  return builtin_problem("spring", p);
}

Problem doublewell_steering() {
  ProblemParams p;
  p.n = 1;
  p.q0 = vec({-1.0});
  p.v0 = vec({0.0});
  p.horizon = 5.0;
  p.w_q = 10.0;
  p.w_v = 10.0;
  p.q_target = vec({1.0});
  p.v_target = vec({0.0});
  return builtin_problem("doublewell", p);
}

constexpr double kRegressionB = 2.0 / (2.0 + M_PI);
constexpr double kRegressionJ = 1.0 / (2.0 + M_PI);

double rel(double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

} // namespace

TEST_CASE("terminal residual rows") {
  ForceField spring = spring_force(1, 1.0);
  CombinedState y0{vec({0.3}), vec({0.0})};
  CombinedVelocity ydot0{vec({0.1}), vec({0.0})};
  Grid grid(1.0, 20);
  auto traj = integrate_ivp(y0, ydot0, grid, spring, Method::Variational);

  TerminalCost zero;
  zero.q_target = Vector::Zero(1);
  zero.v_target = Vector::Zero(1);
  // lam stays 0 along the uncontrolled branch, so both rows vanish
  CHECK(terminal_residual(traj, zero).norm() <= 1e-12);

  // w_q = 1 with the target placed on the terminal point: the q-row reduces
  // to -lamdot(T) = p_q(T), the v-row to lam(T)
  TerminalCost hit;
  hit.w_q = 1.0;
  hit.w_v = 0.0;
  hit.q_target = traj.nodes.back().y.q;
  hit.v_target = Vector::Zero(1);
  const Vector r = terminal_residual(traj, hit);
  CHECK(std::abs(r(0) - traj.nodes.back().p_q(0)) <= 1e-14);
  CHECK(std::abs(r(1) - traj.nodes.back().y.lam(0)) <= 1e-14);

  DiscreteTrajectory empty;
  CHECK_THROWS_AS((void)terminal_residual(empty, zero), std::invalid_argument);
}

TEST_CASE("objective quadrature on handcrafted multiplier curves") {
  TerminalCost zero;
  zero.q_target = Vector::Zero(1);
  zero.v_target = Vector::Zero(1);

  const double T = 2.0;
  const int N = 50;
  Grid grid(T, N);

  auto make_traj = [&](auto lam_of_t) {
    DiscreteTrajectory traj;
    traj.grid = grid;
    for (int k = 0; k <= N; ++k) {
      PhasePoint z{CombinedState{vec({0.0}), vec({lam_of_t(grid.node(k))})}, vec({0.0}),
                   vec({0.0})};
      traj.nodes.push_back(z);
    }
    return traj;
  };

  auto flat = make_traj([](double) { return 0.0; });
  CHECK(objective_of(flat, zero) == doctest::Approx(0.0));

  const double c = 0.7;
  auto constant = make_traj([&](double) { return c; });
  CHECK(objective_of(constant, zero) == doctest::Approx(0.5 * c * c * T).epsilon(1e-14));

  // linear multiplier: trapezoid error against the analytic integral is
  // exactly h^2/12 * b^2 * T for the quadratic integrand
  const double a = 0.4, b = -0.9;
  auto linear = make_traj([&](double t) { return a + b * t; });
  const double exact =
      0.5 * (a * a * T + a * b * T * T + b * b * T * T * T / 3.0);
  const double h = grid.h();
  CHECK(std::abs(objective_of(linear, zero) - exact - h * h / 12.0 * b * b * T) <= 1e-12);
}

TEST_CASE("zero terminal cost: the uncontrolled flow is the optimum") {
  ProblemParams p;
  p.n = 2;
  p.stiffness = 1.3;
  p.q0 = vec({1.0, -0.5});
  p.v0 = vec({0.2, 0.0});
  p.horizon = 3.0;
  Problem prob = builtin_problem("spring", p);
  Grid grid(3.0, 60);

  ShootingResult r = shoot(prob, grid, ShootingUnknown{Vector::Zero(2), Vector::Zero(2)});
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.objective == doctest::Approx(0.0));
  for (const PhasePoint& z : r.trajectory.nodes) CHECK(z.y.lam.norm() <= 1e-12);
}

TEST_CASE("spring regression: closed-form boundary data and cost") {
  Problem prob = spring_regression();
  Grid grid(M_PI, 400);
  ShootingResult r = shoot(prob, grid, ShootingUnknown{vec({0.0}), vec({0.0})});

  REQUIRE(r.converged);
  CHECK(r.iterations == 1);  // affine residual: one outer step
  CHECK(rel(r.unknown.lam0(0), 0.0) <= 1e-5);
  CHECK(rel(r.unknown.lamdot0(0), kRegressionB) <= 1e-5);
  CHECK(rel(r.objective, kRegressionJ) <= 1e-5);
  CHECK(r.residual_norm <= 1e-9);

  // the converged chain is stationary and meets the boundary rows
  CHECK(del_residual(r.trajectory, prob.force) <= 1e-10);
  CHECK(terminal_residual(r.trajectory, prob.phi).cwiseAbs().maxCoeff() <= 1e-9);

  // the residual map is affine in the unknown, so a single Newton step lands
  // on the solution up to the finite-difference sensitivity noise; nonzero
  // guesses may need one cleanup iteration to pass the 1e-9 tolerance
  ShootingResult far = shoot(prob, grid, ShootingUnknown{vec({3.0}), vec({-7.0})});
  CHECK(far.converged);
  CHECK(far.iterations <= 2);
  CHECK(rel(far.objective, kRegressionJ) <= 1e-5);
}

TEST_CASE("objective decreases monotonically under refinement") {
  Problem prob = spring_regression();
  double previous = std::numeric_limits<double>::infinity();
  for (int n : {50, 100, 200, 400}) {
    ShootingResult r = shoot(prob, Grid(M_PI, n), ShootingUnknown{vec({0.0}), vec({0.0})});
    REQUIRE(r.converged);
    CHECK(r.objective < previous);
    CHECK(r.objective > kRegressionJ - 1e-12);  // oracle value is the infimum
    previous = r.objective;
  }
  CHECK(rel(previous, kRegressionJ) <= 1e-5);
}

TEST_CASE("terminal weights scale the multiplier, zero weights stay fixed") {
  ProblemParams p;
  p.n = 1;
  p.stiffness = 1.0;
  p.q0 = vec({0.0});
  p.v0 = vec({0.0});
  p.horizon = M_PI;
  p.w_q = 1.0;
  p.w_v = 1.0;
  p.q_target = vec({1.0});
  p.v_target = vec({0.0});
  Grid grid(M_PI, 100);

  ShootingResult base =
      shoot(builtin_problem("spring", p), grid, ShootingUnknown{vec({0.0}), vec({0.0})});
  p.w_q = 2.0;
  p.w_v = 2.0;
  ShootingResult heavy =
      shoot(builtin_problem("spring", p), grid, ShootingUnknown{vec({0.0}), vec({0.0})});
  REQUIRE(base.converged);
  REQUIRE(heavy.converged);
  CHECK(heavy.unknown.lamdot0(0) > base.unknown.lamdot0(0));
  CHECK(base.unknown.lamdot0(0) > 0.0);

  p.w_q = 0.0;
  p.w_v = 0.0;
  ShootingResult free_run =
      shoot(builtin_problem("spring", p), grid, ShootingUnknown{vec({0.0}), vec({0.0})});
  CHECK(free_run.iterations == 0);
  CHECK(free_run.objective == doctest::Approx(0.0));
}

TEST_CASE("doublewell steering: convergence from a warm guess, failure diagnostics") {
  Problem prob = doublewell_steering();
  Grid grid(5.0, 400);

  ShootingOptions opts;
  opts.max_iter = 100;
  ShootingResult good = shoot(prob, grid, ShootingUnknown{vec({0.51}), vec({0.56})}, opts);
  REQUIRE(good.converged);
  CHECK(good.residual_norm <= opts.tol);
  CHECK(good.objective == doctest::Approx(0.4894222126).epsilon(1e-6));
  // the terminal state must have crossed to the +1 well
  CHECK(good.trajectory.nodes.back().y.q(0) > 0.9);
  // stationarity along the chain, limited by the h^2 derivative reconstruction
  CHECK(pmp_residual_along(good.trajectory, prob.force).max_residual <= 5e-4);

  ShootingOptions capped;
  capped.max_iter = 3;
  ShootingResult bad = shoot(prob, grid, ShootingUnknown{vec({0.0}), vec({0.0})}, capped);
  CHECK_FALSE(bad.converged);
  CHECK_FALSE(bad.message.empty());
  CHECK(std::isfinite(bad.residual_norm));

  CHECK_THROWS_AS(shoot(prob, grid, ShootingUnknown{Vector::Zero(2), Vector::Zero(2)}),
                  std::invalid_argument);
}

TEST_CASE("shooting is deterministic for a fixed seed") {
  Problem prob = doublewell_steering();
  Grid grid(5.0, 100);
  ShootingOptions opts;
  opts.multistart = 4;
  opts.seed = 123;
  opts.max_iter = 40;
  ShootingResult a = shoot(prob, grid, ShootingUnknown{vec({0.5}), vec({0.5})}, opts);
  ShootingResult b = shoot(prob, grid, ShootingUnknown{vec({0.5}), vec({0.5})}, opts);
  CHECK(a.converged == b.converged);
  CHECK(a.unknown.lam0(0) == b.unknown.lam0(0));
  CHECK(a.unknown.lamdot0(0) == b.unknown.lamdot0(0));
  CHECK(a.objective == b.objective);
}
