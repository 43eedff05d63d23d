#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "costate/bvp.hpp"
#include "costate/diagnostics.hpp"
#include "costate/direct.hpp"
#include "costate/model.hpp"

namespace py = pybind11;
using namespace costate;

namespace {

Method method_from(const std::string& name) {
  if (name == "variational") return Method::Variational;
  if (name == "rk4") return Method::Rk4;
  throw std::invalid_argument("method must be 'variational' or 'rk4'");
}

Matrix stack_nodes(const DiscreteTrajectory& traj,
                   const std::function<Vector(const PhasePoint&)>& pick) {
  const int n = traj.dim();
  Matrix out(static_cast<int>(traj.nodes.size()), n);
  for (size_t k = 0; k < traj.nodes.size(); ++k)
    out.row(static_cast<int>(k)) = pick(traj.nodes[k]).transpose();
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "optimal control of q'' = f(q) + u through the combined state-adjoint system";

  py::class_<ForceField>(m, "ForceField")
      .def_readonly("name", &ForceField::name)
      .def_readonly("dim", &ForceField::dim)
      .def("__call__", [](const ForceField& f, const Vector& q) { return f.eval(q); })
      .def("jacobian", [](const ForceField& f, const Vector& q) { return f.jacobian(q); });

  m.def("spring_force", &spring_force, py::arg("n"), py::arg("stiffness"));
  m.def("central_force", &central_force, py::arg("mu"));
  m.def("doublewell_force", &doublewell_force, py::arg("n"));
  m.def("linear_force", &linear_force, py::arg("a"));

  py::class_<Grid>(m, "Grid")
      .def(py::init<double, int>(), py::arg("horizon"), py::arg("steps"))
      .def_readonly("horizon", &Grid::horizon)
      .def_readonly("steps", &Grid::steps)
      .def_property_readonly("h", &Grid::h)
      .def("node", &Grid::node, py::arg("k"));

  py::class_<Problem>(m, "Problem")
      .def_readonly("q0", &Problem::q0)
      .def_readonly("v0", &Problem::v0)
      .def_readonly("horizon", &Problem::horizon)
      .def_property_readonly("force", [](const Problem& p) { return p.force; })
      .def_property_readonly("dim", &Problem::dim);

  m.def(
      "builtin_problem",
      [](const std::string& name, int n, const Vector& q0, const Vector& v0, double horizon,
         double w_q, double w_v, std::optional<Vector> q_target, std::optional<Vector> v_target,
         std::optional<double> stiffness, std::optional<double> mu, std::optional<Matrix> a) {
        ProblemParams params;
        params.n = n;
        params.q0 = q0;
        params.v0 = v0;
        params.horizon = horizon;
        params.w_q = w_q;
        params.w_v = w_v;
        params.q_target = q_target.value_or(Vector::Zero(n));
        params.v_target = v_target.value_or(Vector::Zero(n));
        params.stiffness = stiffness;
        params.mu = mu;
        params.a = a;
        return builtin_problem(name, params);
      },
      py::arg("name"), py::arg("n"), py::arg("q0"), py::arg("v0"), py::arg("horizon"),
      py::arg("w_q") = 0.0, py::arg("w_v") = 0.0, py::arg("q_target") = std::nullopt,
      py::arg("v_target") = std::nullopt, py::arg("stiffness") = std::nullopt,
      py::arg("mu") = std::nullopt, py::arg("a") = std::nullopt);

  py::class_<DiscreteTrajectory>(m, "DiscreteTrajectory")
      .def("__len__", [](const DiscreteTrajectory& t) { return t.nodes.size(); })
      .def_property_readonly("grid", [](const DiscreteTrajectory& t) { return t.grid; })
      .def_property_readonly("q", [](const DiscreteTrajectory& t) {
        return stack_nodes(t, [](const PhasePoint& z) { return z.y.q; });
      })
      .def_property_readonly("lam", [](const DiscreteTrajectory& t) {
        return stack_nodes(t, [](const PhasePoint& z) { return z.y.lam; });
      })
      .def_property_readonly("qdot", [](const DiscreteTrajectory& t) {
        return stack_nodes(t, [](const PhasePoint& z) { return Vector(-z.p_lam); });
      })
      .def_property_readonly("lamdot", [](const DiscreteTrajectory& t) {
        return stack_nodes(t, [](const PhasePoint& z) { return Vector(-z.p_q); });
      });

  m.def(
      "integrate_ivp",
      [](const Problem& problem, const Vector& lam0, const Vector& lamdot0, const Grid& grid,
         const std::string& method) {
        return integrate_ivp(CombinedState{problem.q0, lam0},
                             CombinedVelocity{problem.v0, lamdot0}, grid, problem.force,
                             method_from(method));
      },
      py::arg("problem"), py::arg("lam0"), py::arg("lamdot0"), py::arg("grid"),
      py::arg("method") = "variational");

  py::class_<ShootingResult>(m, "ShootingResult")
      .def_readonly("residual_norm", &ShootingResult::residual_norm)
      .def_readonly("objective", &ShootingResult::objective)
      .def_readonly("iterations", &ShootingResult::iterations)
      .def_readonly("converged", &ShootingResult::converged)
      .def_readonly("message", &ShootingResult::message)
      .def_property_readonly("trajectory",
                             [](const ShootingResult& r) { return r.trajectory; })
      .def_property_readonly("lam0", [](const ShootingResult& r) { return r.unknown.lam0; })
      .def_property_readonly("lamdot0",
                             [](const ShootingResult& r) { return r.unknown.lamdot0; });

  m.def(
      "shoot",
      [](const Problem& problem, const Grid& grid, std::optional<Vector> lam0,
         std::optional<Vector> lamdot0, double tol, int max_iter, const std::string& method) {
        ShootingOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        opts.method = method_from(method);
        const int n = problem.dim();
        return shoot(problem, grid,
                     ShootingUnknown{lam0.value_or(Vector::Zero(n)),
                                     lamdot0.value_or(Vector::Zero(n))},
                     opts);
      },
      py::arg("problem"), py::arg("grid"), py::arg("lam0") = std::nullopt,
      py::arg("lamdot0") = std::nullopt, py::arg("tol") = 1e-9, py::arg("max_iter") = 50,
      py::arg("method") = "variational");

  py::class_<DirectResult>(m, "DirectResult")
      .def_readonly("objective", &DirectResult::objective)
      .def_readonly("gradient_norm", &DirectResult::gradient_norm)
      .def_readonly("iterations", &DirectResult::iterations)
      .def_readonly("converged", &DirectResult::converged)
      .def_property_readonly("u", [](const DirectResult& r) {
        const int n = r.controls.dim();
        Matrix out(static_cast<int>(r.controls.u.size()), n);
        for (size_t k = 0; k < r.controls.u.size(); ++k)
          out.row(static_cast<int>(k)) = r.controls.u[k].transpose();
        return out;
      });

  m.def(
      "direct_optimize",
      [](const Problem& problem, const Grid& grid, double grad_tol, int max_iter,
         bool adjoint_gradient) {
        DirectOptions opts;
        opts.grad_tol = grad_tol;
        opts.max_iter = max_iter;
        opts.adjoint_gradient = adjoint_gradient;
        return optimize(problem, grid, ControlGrid::zeros(grid, problem.dim()), opts);
      },
      py::arg("problem"), py::arg("grid"), py::arg("grad_tol") = 1e-8,
      py::arg("max_iter") = 500, py::arg("adjoint_gradient") = false);

  m.def(
      "hamiltonian_drift",
      [](const DiscreteTrajectory& traj, const Problem& problem) {
        return hamiltonian_drift(traj, problem.force).max_drift;
      },
      py::arg("trajectory"), py::arg("problem"));

  m.def(
      "noether_drift",
      [](const DiscreteTrajectory& traj, const Matrix& xi) {
        return noether_drift(traj, SymmetryGenerator{xi}).max_drift;
      },
      py::arg("trajectory"), py::arg("generator"));
}
