"""Primal log-barrier interior-point solver with an infeasible-start guard.

Stages multiply the barrier parameter by 10 starting from ``t0`` and run a
damped Newton method with Armijo backtracking (alpha = 0.01, beta = 0.5) on
the scaled variables.  Equality constraints stay in the Newton KKT system;
box bounds and inequality rows enter the barrier.  The Hessian is
regularized by an escalating multiple of the identity when factorization
fails.  Everything is deterministic: no randomness anywhere.

A strictly feasible start is required; when the caller cannot provide one,
phase I minimizes the worst constraint value through the same machinery and
stops as soon as it dips below zero.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .program import ConvexProgram

ARMIJO_ALPHA = 0.01
ARMIJO_BETA = 0.5
BARRIER_MU = 10.0
BASE_REG = 1e-9


class SolverError(RuntimeError):
    pass


class InfeasibleError(SolverError):
    pass


@dataclass
class SolveReport:
    """Convergence evidence for one solve."""

    status: str = "numerical-failure"
    objective: float = np.nan
    stage_objectives: list = field(default_factory=list)
    stationarity: float = np.nan
    ineq_residual: float = np.nan
    eq_residual: float = np.nan
    gap: float = np.nan
    t_final: float = np.nan
    newton_iters: int = 0
    wall_time_s: float = 0.0
    message: str = ""


class _Barrier:
    """Barrier evaluation state for one program."""

    def __init__(self, program: ConvexProgram):
        self.p = program
        self.fin_lb = np.isfinite(program.lb)
        self.fin_ub = np.isfinite(program.ub)
        self.m = program.ncon + int(self.fin_lb.sum() + self.fin_ub.sum())
        self.gc = np.zeros((program.ncon + 1, program.nvar))

    def value(self, z: np.ndarray, t: float) -> float:
        p = self.p
        sl = z[self.fin_lb] - p.lb[self.fin_lb]
        su = p.ub[self.fin_ub] - z[self.fin_ub]
        if np.any(sl <= 0) or np.any(su <= 0):
            return np.inf
        rowvals, ok = p.row_values(z)
        if not ok:
            return np.inf
        f = rowvals[: p.ncon]
        if np.any(f >= 0):
            return np.inf
        return (t * rowvals[p.ncon] - np.log(-f).sum()
                - np.log(sl).sum() - np.log(su).sum())

    def strictly_feasible(self, z: np.ndarray) -> bool:
        return np.isfinite(self.value(z, 1.0))

    def derivatives(self, z: np.ndarray, t: float):
        """(rowvals, gradient, hessian) of the barrier at a feasible z."""
        p = self.p
        rowvals, ok = p.row_values(z)
        f = rowvals[: p.ncon]
        if not ok or np.any(f >= 0):
            raise SolverError("barrier derivative request outside domain")
        w1 = -1.0 / f
        roww = np.append(w1, t)
        gc = self.gc
        gc[:] = 0.0
        p.row_gradients(z, gc)
        g = gc.T @ roww

        h = np.zeros((p.nvar, p.nvar))
        p.weighted_hessian(z, roww, h)
        p.rank_one_hessian(gc, w1 * w1, h)

        sl = z - p.lb
        su = p.ub - z
        g[self.fin_lb] -= 1.0 / sl[self.fin_lb]
        g[self.fin_ub] += 1.0 / su[self.fin_ub]
        diag = np.zeros(p.nvar)
        diag[self.fin_lb] += 1.0 / sl[self.fin_lb] ** 2
        diag[self.fin_ub] += 1.0 / su[self.fin_ub] ** 2
        h[np.diag_indices_from(h)] += diag
        return rowvals, g, h


def project_equalities(program: ConvexProgram, z: np.ndarray) -> np.ndarray:
    """Least-squares correction onto A z = b."""
    if len(program.b_eq) == 0:
        return z
    a = program.a_eq
    r = program.b_eq - a @ z
    if np.abs(r).max() < 1e-13:
        return z
    corr, *_ = np.linalg.lstsq(a, r, rcond=None)
    return z + corr


def _newton_loop(bar: _Barrier, z: np.ndarray, t: float, budget: int,
                 newton_tol: float, early_stop=None):
    """Center at barrier parameter t.  Returns (z, iters, nu, stopped)."""
    p = bar.p
    scale = p.scale
    neq = len(p.b_eq)
    a_s = p.a_eq * scale[None, :] if neq else None
    nu = np.zeros(neq)
    iters = 0
    while iters < budget:
        rowvals, g, h = bar.derivatives(z, t)
        if early_stop is not None and early_stop(z, rowvals):
            return z, iters, nu, True
        gs = g * scale
        hs = h * scale[None, :] * scale[:, None]
        reg = BASE_REG
        while True:
            try:
                with warnings.catch_warnings():
                    # near-converged barriers are legitimately ill-conditioned
                    warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                    if neq:
                        kkt = np.zeros((p.nvar + neq, p.nvar + neq))
                        kkt[: p.nvar, : p.nvar] = hs
                        kkt[np.diag_indices(p.nvar)] += reg
                        kkt[: p.nvar, p.nvar:] = a_s.T
                        kkt[p.nvar:, : p.nvar] = a_s
                        rhs = np.concatenate([-gs, p.b_eq - p.a_eq @ z])
                        sol = scipy.linalg.solve(kkt, rhs, assume_a="sym")
                        ds, nu = sol[: p.nvar], sol[p.nvar:]
                    else:
                        hreg = hs.copy()
                        hreg[np.diag_indices(p.nvar)] += reg
                        ds = scipy.linalg.solve(hreg, -gs, assume_a="sym")
                if not np.all(np.isfinite(ds)):
                    raise np.linalg.LinAlgError("non-finite step")
                lam2 = float(ds @ (hs @ ds))
                if lam2 < 0 or gs @ ds > 0:
                    raise np.linalg.LinAlgError("non-descent direction")
                break
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError,
                    ValueError):
                reg = reg * 100 if reg > 0 else BASE_REG
                if reg > 1e6:
                    raise SolverError(
                        "newton system not positive definite after "
                        "regularization")
        iters += 1
        if lam2 / 2.0 <= newton_tol:
            return z, iters, nu, False
        dz = ds * scale
        slope = float(gs @ ds)
        phi0 = bar.value(z, t)
        step = 1.0
        for _ in range(60):
            znew = z + step * dz
            if bar.value(znew, t) <= phi0 + ARMIJO_ALPHA * step * slope:
                break
            step *= ARMIJO_BETA
        else:
            return z, iters, nu, False  # stalled; centering is good enough
        z = znew
    return z, iters, nu, False


def solve_convex(program: ConvexProgram, tol: float = 1e-6,
                 max_iter: int = 400, z0: np.ndarray | None = None,
                 t0: float = 1.0, newton_tol: float = 1e-9,
                 early_stop=None):
    """Minimize the program's objective; returns (z, SolveReport).

    ``z0`` must be strictly feasible; when it is absent or not strict,
    phase I searches for one and raises InfeasibleError if none exists.
    ``t0`` warm-starts the barrier parameter schedule.
    """
    started = time.perf_counter()
    bar = _Barrier(program)
    if z0 is None:
        z = find_strict_point(program, tol=tol)
    else:
        z = project_equalities(program, np.asarray(z0, dtype=float).copy())
        if not bar.strictly_feasible(z):
            z = find_strict_point(program, hint=z, tol=tol)

    report = SolveReport()
    t = max(t0, 1e-12)
    total_iters = 0
    nu = np.zeros(len(program.b_eq))
    stopped_early = False
    while True:
        z, used, nu, stopped_early = _newton_loop(
            bar, z, t, max_iter - total_iters, newton_tol, early_stop)
        total_iters += used
        rowvals, ok = program.row_values(z)
        obj = rowvals[program.ncon] + program.objective_const
        report.stage_objectives.append(float(obj))
        gap = bar.m / t
        if stopped_early:
            report.status = "early-stop"
            break
        if gap <= tol * (1.0 + abs(obj)):
            report.status = "optimal"
            break
        if total_iters >= max_iter:
            report.status = "iteration-limit"
            break
        t *= BARRIER_MU

    # residuals at the returned point
    rowvals, g, _h = _final_residual_parts(bar, z, t)
    f = rowvals[: program.ncon]
    if len(program.b_eq):
        stat_vec = (g + program.a_eq.T @ nu) * program.scale / t
        report.eq_residual = float(
            np.abs(program.a_eq @ z - program.b_eq).max())
    else:
        stat_vec = g * program.scale / t
        report.eq_residual = 0.0
    report.stationarity = float(np.abs(stat_vec).max())
    report.ineq_residual = (float((f / program.row_scale).max())
                            if program.ncon else -np.inf)
    report.gap = bar.m / t
    report.t_final = t
    report.objective = float(rowvals[program.ncon] + program.objective_const)
    report.newton_iters = total_iters
    report.wall_time_s = time.perf_counter() - started
    if report.status == "optimal" and (
            report.ineq_residual > tol or report.eq_residual > tol):
        report.status = "numerical-failure"
        report.message = "residuals above tolerance at barrier optimum"
    return z, report


def _final_residual_parts(bar: _Barrier, z: np.ndarray, t: float):
    p = bar.p
    rowvals, ok = p.row_values(z)
    if not ok:
        raise SolverError("returned point left the atom domain")
    f = rowvals[: p.ncon]
    w1 = -1.0 / np.minimum(f, -1e-300)
    roww = np.append(w1, t)
    gc = bar.gc
    gc[:] = 0.0
    p.row_gradients(z, gc)
    g = gc.T @ roww
    sl = np.maximum(z - p.lb, 1e-300)
    su = np.maximum(p.ub - z, 1e-300)
    g[bar.fin_lb] -= 1.0 / sl[bar.fin_lb]
    g[bar.fin_ub] += 1.0 / su[bar.fin_ub]
    return rowvals, g, None


def find_strict_point(program: ConvexProgram, hint: np.ndarray | None = None,
                      tol: float = 1e-6, max_iter: int = 200) -> np.ndarray:
    """Phase I: return a strictly feasible point or raise InfeasibleError."""
    aug, s_idx = program.with_slack()
    z0 = _box_interior(program, hint)
    rowvals, ok = program.row_values(z0)
    if not ok:
        raise SolverError("phase-I start violates atom domains")
    maxf = rowvals[: program.ncon].max() if program.ncon else -1.0
    if maxf < 0 and _Barrier(program).strictly_feasible(z0):
        return z0
    z0_aug = np.append(z0, max(maxf + 1.0, 1.0))
    margin = 1e-8

    def early(z, rowvals_aug):
        # raw f_i = (f_i - s) + s
        raw = rowvals_aug[: program.ncon] + z[s_idx]
        return raw.max() < -margin

    z_aug, report = solve_convex(aug, tol=tol, max_iter=max_iter,
                                 z0=z0_aug, early_stop=early)
    if report.status == "early-stop":
        return z_aug[:-1]
    s_star = float(z_aug[s_idx])
    if s_star > tol:
        raise InfeasibleError(
            f"phase-I optimum {s_star:.3e} above tolerance {tol:.1e}")
    z = z_aug[:-1]
    if not _Barrier(program).strictly_feasible(z):
        raise InfeasibleError("phase-I point not strictly feasible")
    return z


def _box_interior(program: ConvexProgram,
                  hint: np.ndarray | None) -> np.ndarray:
    lb, ub = program.lb, program.ub
    mid = np.zeros(program.nvar)
    both = np.isfinite(lb) & np.isfinite(ub)
    only_lb = np.isfinite(lb) & ~np.isfinite(ub)
    only_ub = ~np.isfinite(lb) & np.isfinite(ub)
    mid[both] = 0.5 * (lb[both] + ub[both])
    mid[only_lb] = lb[only_lb] + np.maximum(1.0, np.abs(lb[only_lb]) * 0.1)
    mid[only_ub] = ub[only_ub] - np.maximum(1.0, np.abs(ub[only_ub]) * 0.1)
    z = mid if hint is None else np.asarray(hint, dtype=float).copy()
    span = np.where(both, ub - lb, np.inf)
    pad = np.minimum(1e-3 * np.where(np.isfinite(span), span, 1.0), 1e-3)
    for _ in range(50):
        z = project_equalities(program, z)
        lo_bad = np.isfinite(lb) & (z < lb + pad)
        hi_bad = np.isfinite(ub) & (z > ub - pad)
        if not lo_bad.any() and not hi_bad.any():
            break
        z[lo_bad] = lb[lo_bad] + 2 * pad[lo_bad]
        z[hi_bad] = ub[hi_bad] - 2 * pad[hi_bad]
    else:
        # fall back to the hint-free midpoint path once
        if hint is not None:
            return _box_interior(program, None)
        raise SolverError("could not construct a box-interior start")
    return z
