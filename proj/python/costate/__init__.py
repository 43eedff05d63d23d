"""Optimal control of q'' = f(q) + u through the combined state-adjoint system.

The heavy lifting lives in the compiled extension ``costate._core``: builtin
force fields, the symplectic variational integrator on the combined
state-adjoint phase space, the single-shooting boundary-value solver, the
direct transcription oracle, and the invariant diagnostics.
"""

from ._core import (
    DirectResult,
    DiscreteTrajectory,
    ForceField,
    Grid,
    Problem,
    ShootingResult,
    builtin_problem,
    central_force,
    direct_optimize,
    doublewell_force,
    hamiltonian_drift,
    integrate_ivp,
    linear_force,
    noether_drift,
    shoot,
    spring_force,
)

__version__ = "0.1.0"

__all__ = [
    "DirectResult",
    "DiscreteTrajectory",
    "ForceField",
    "Grid",
    "Problem",
    "ShootingResult",
    "builtin_problem",
    "central_force",
    "direct_optimize",
    "doublewell_force",
    "hamiltonian_drift",
    "integrate_ivp",
    "linear_force",
    "noether_drift",
    "shoot",
    "spring_force",
]
