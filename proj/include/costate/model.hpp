#pragma once

#include <functional>
#include <optional>
#include <string>

#include "costate/types.hpp"

namespace costate {

/// Symmetry group a force field is equivariant under, if any.
enum class EquivarianceTag { None, OrthogonalGroup, Rotation3d };

/// Autonomous force field f: R^n -> R^n with its exact Jacobian.
/// The Jacobian feeds the adjoint dynamics, so it must be analytic,
/// not a finite-difference stand-in.
struct ForceField {
  std::string name;
  int dim = 0;
  std::function<Vector(const Vector&)> eval;
  std::function<Matrix(const Vector&)> jacobian;
  EquivarianceTag tag = EquivarianceTag::None;
};

ForceField linear_force(const Matrix& a);
ForceField spring_force(int n, double stiffness);
ForceField central_force(double mu);
ForceField doublewell_force(int n);

/// Quadratic tracking cost phi(q, v) = w_q/2 |q - q_target|^2 + w_v/2 |v - v_target|^2.
struct TerminalCost {
  double w_q = 0.0;
  double w_v = 0.0;
  Vector q_target;
  Vector v_target;

  double value(const Vector& q, const Vector& v) const;
  Vector grad_q(const Vector& q, const Vector& v) const;
  Vector grad_v(const Vector& q, const Vector& v) const;
  int dim() const { return static_cast<int>(q_target.size()); }
};

/// One optimal control instance: dynamics qdd = f(q) + u on [0, T],
/// fixed initial state, free final state, cost phi(q(T), qd(T)) + int |u|^2/2.
struct Problem {
  ForceField force;
  TerminalCost phi;
  Vector q0;
  Vector v0;
  double horizon = 0.0;

  int dim() const { return force.dim; }
  void validate() const;
};

/// Parameters for the builtin problem registry. Force constants are optional
/// because each builtin requires different ones; missing required entries
/// are an error, as are entries for constants the named force does not take.
struct ProblemParams {
  int n = 1;
  std::optional<double> stiffness;  // spring
  std::optional<double> mu;         // central
  std::optional<Matrix> a;          // linear
  Vector q0;
  Vector v0;
  double horizon = 1.0;
  double w_q = 0.0;
  double w_v = 0.0;
  Vector q_target;
  Vector v_target;
};

/// Builtin names: "linear", "spring", "central", "doublewell".
Problem builtin_problem(const std::string& name, const ProblemParams& params);

/// Max over trials of |f(g q) - g f(q)|_inf / (1 + |f(q)|_inf) with g drawn
/// from the field's tagged group. Deterministic for a fixed seed.
double check_equivariance(const ForceField& force, int trials, unsigned seed);

} // namespace costate
