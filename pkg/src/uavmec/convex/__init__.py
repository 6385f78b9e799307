"""Smooth convex programs and a log-barrier interior-point solver.

The subproblem builders assemble programs from a small taxonomy of twice
differentiable convex atoms; the solver minimizes over box bounds, atom-sum
inequality rows and linear equalities.  Atom value/gradient/Hessian
evaluation is the hot path and runs through numba kernels by default, with
a pure-numpy fallback selected by ``UAVMEC_BACKEND=numpy``.
"""

from .program import ConvexProgram, ProgramBuilder, OBJECTIVE, check_derivatives
from .solver import SolveReport, solve_convex, SolverError, InfeasibleError
from .kernels import BACKEND

__all__ = [
    "ConvexProgram",
    "ProgramBuilder",
    "OBJECTIVE",
    "check_derivatives",
    "SolveReport",
    "solve_convex",
    "SolverError",
    "InfeasibleError",
    "BACKEND",
]
