"""First-order bounds used to convexify the non-convex terms.

Each constructor takes the expansion point of the current iterate and
returns a small coefficient object that (a) evaluates the bound numerically
and (b) exposes the affine coefficients the subproblem builders assemble
into solver atoms.  Every lower bound satisfies bound <= true everywhere
with equality at the expansion point, and mirrored for upper bounds; the
test suite enforces these directions by sampling.

All coefficients are derived analytically from the bounded functions rather
than transcribed from display equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG2E = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class LinearizationPoint:
    """Previous-iterate values a subproblem expands its bounds around.

    Only the fields a particular scheme needs are set; ``validate`` checks
    the ones present are finite and respect their floors.
    """

    v: np.ndarray | None = None        # velocities (.., 2)
    y: np.ndarray | None = None        # distance-squared slacks, m^2
    q: np.ndarray | None = None        # positions (.., 2)
    p: np.ndarray | None = None        # transmit powers, W
    x: np.ndarray | None = None        # schedule fractions
    s: np.ndarray | None = None        # rate slacks
    tau: np.ndarray | None = None      # speed slacks, m/s

    def validate(self, tau_floor: float = 0.0) -> None:
        for name in ("v", "y", "q", "p", "x", "s", "tau"):
            arr = getattr(self, name)
            if arr is None:
                continue
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"linearization point {name} not finite")
        if self.y is not None and np.any(self.y < 0):
            raise ValueError("linearization point y negative")
        if self.tau is not None and np.any(self.tau < tau_floor):
            raise ValueError("linearization point tau below floor")


@dataclass(frozen=True)
class AffineBound:
    """c0 + sum(coef * var): an affine under/over-estimator."""

    c0: float
    coef: np.ndarray

    def value(self, *vars_):
        flat = np.concatenate([np.atleast_1d(np.asarray(v, float)).ravel()
                               for v in vars_])
        return self.c0 + float(self.coef @ flat)


def speed_sq_lb(v_l) -> AffineBound:
    """Global affine under-estimator of ||v||^2 expanded at v_l."""
    v_l = np.asarray(v_l, dtype=float)
    return AffineBound(c0=-float(v_l @ v_l), coef=2.0 * v_l)


@dataclass(frozen=True)
class OrthogonalRateBound:
    """Concave lower bound on log2(1 + p g0 / (y + H^2)).

    The log of the total received-plus-noise term stays exact (it is jointly
    concave in (p, y)); only log2(y + H^2) is replaced by its tangent at
    y_l, which over-estimates it and therefore under-estimates the rate.
    """

    y_l: float
    gamma0: float
    altitude: float
    r0: float
    r1: float

    def value(self, p, y):
        arg = y + self.altitude ** 2 + p * self.gamma0
        return np.log2(arg) - (self.r0 + self.r1 * np.asarray(y, float))

    def true_rate(self, p, y):
        return np.log2(1.0 + p * self.gamma0 / (y + self.altitude ** 2))


def rate_lb_orthogonal(y_l: float, gamma0: float, altitude: float
                       ) -> OrthogonalRateBound:
    if y_l < 0:
        raise ValueError("y_l must be nonnegative")
    base = y_l + altitude ** 2
    r1 = LOG2E / base
    r0 = np.log2(base) - r1 * y_l
    return OrthogonalRateBound(y_l, gamma0, altitude, r0, r1)


def sumsq_lb(x_l: float, p_l: float) -> AffineBound:
    """Affine under-estimator of x^2 + p^2 at (x_l, p_l)."""
    return AffineBound(c0=-(x_l ** 2 + p_l ** 2),
                       coef=np.array([2.0 * x_l, 2.0 * p_l]))


@dataclass(frozen=True)
class CommEnergyUpperBound:
    """Convex upper bound of the x*p*delta energy product at (x_l, p_l).

    ((x+p)^2 - z_lb(x,p)) / 2 * delta, where z_lb under-estimates x^2 + p^2.
    """

    x_l: float
    p_l: float
    delta: float
    z_lb: AffineBound

    def value(self, x, p):
        z = self.z_lb.c0 + self.z_lb.coef[0] * x + self.z_lb.coef[1] * p
        return ((np.asarray(x, float) + p) ** 2 - z) / 2.0 * self.delta


def comm_energy_ub(x_l: float, p_l: float, delta: float
                   ) -> CommEnergyUpperBound:
    return CommEnergyUpperBound(x_l, p_l, delta, sumsq_lb(x_l, p_l))


def prod_sum_lb(x_l: float, s_l: float) -> AffineBound:
    """Affine under-estimator of (x + s)^2 at (x_l, s_l)."""
    t = x_l + s_l
    return AffineBound(c0=-t * t, coef=np.array([2.0 * t, 2.0 * t]))


@dataclass(frozen=True)
class NomaSumRateBound:
    """Concave lower bound on the all-UAV sum-rate term of the NOMA uplink.

    The full received power log2(1 + sum_k p_k g0 / (||q_k - w||^2 + H^2))
    is convex in the squared distances, so its tangent in those variables is
    a global under-estimator; substituting the squared distances back in
    leaves an expression concave in the positions.  The distance-derivative
    coefficients ``u_coef`` divide by the squared denominator once, as the
    derivative requires.
    """

    c0: float
    u_coef: np.ndarray          # one nonnegative weight per UAV
    p: np.ndarray
    gamma0: float
    altitude: float
    w: np.ndarray

    def value(self, q):
        q = np.asarray(q, dtype=float)
        d2 = np.sum((q - self.w) ** 2, axis=-1)
        return self.c0 - float(self.u_coef @ d2)

    def true_value(self, q):
        q = np.asarray(q, dtype=float)
        d2 = np.sum((q - self.w) ** 2, axis=-1)
        h2 = self.altitude ** 2
        return float(np.log2(1.0 + np.sum(self.p * self.gamma0 / (d2 + h2))))


def noma_sumrate_lb(p, q_l, gamma0: float, altitude: float, w
                    ) -> NomaSumRateBound:
    p = np.asarray(p, dtype=float)
    q_l = np.asarray(q_l, dtype=float)
    w = np.asarray(w, dtype=float)
    h2 = altitude ** 2
    d2_l = np.sum((q_l - w) ** 2, axis=-1)
    s_l = 1.0 + np.sum(p * gamma0 / (d2_l + h2))
    u = (p * gamma0 * LOG2E / (d2_l + h2) ** 2) / s_l
    c0 = float(np.log2(s_l) + u @ d2_l)
    return NomaSumRateBound(c0, u, p.copy(), gamma0, altitude, w.copy())


def dist_sq_lb(q_l, w) -> AffineBound:
    """Affine under-estimator of ||q - w||^2 expanded at q_l."""
    q_l = np.asarray(q_l, dtype=float)
    w = np.asarray(w, dtype=float)
    d = q_l - w
    return AffineBound(c0=float(d @ d) - 2.0 * float(d @ q_l),
                       coef=2.0 * d)


@dataclass(frozen=True)
class InterferenceLogBound:
    """Affine over-estimator of UAV k's interference log at powers p_l.

    log2(1 + sum_{k' != k} p_k' h_k') is concave in p, so its tangent lies
    above it; each interferer's coefficient multiplies that interferer's own
    power increment.
    """

    target: int
    c0: float
    coef: np.ndarray            # zero at the target index
    gains: np.ndarray
    p_l: np.ndarray

    def value(self, p):
        return self.c0 + float(self.coef @ (np.asarray(p, float) - self.p_l))

    def true_value(self, p):
        p = np.asarray(p, dtype=float)
        mask = np.ones(len(p), dtype=bool)
        mask[self.target] = False
        return float(np.log2(1.0 + np.sum(p[mask] * self.gains[mask])))


def interference_log_ub(target: int, p_l, gains) -> InterferenceLogBound:
    """Expand the sigma^2-normalized interference of ``target`` at p_l.

    ``gains`` are the normalized channel gains gamma0 / (d^2 + H^2) > 0.
    """
    p_l = np.asarray(p_l, dtype=float)
    gains = np.asarray(gains, dtype=float)
    if np.any(gains <= 0):
        raise ValueError("channel gains must be positive")
    mask = np.ones(len(p_l), dtype=bool)
    mask[target] = False
    s_l = 1.0 + float(np.sum(p_l[mask] * gains[mask]))
    coef = np.where(mask, gains * LOG2E / s_l, 0.0)
    return InterferenceLogBound(target, float(np.log2(s_l)), coef,
                                gains.copy(), p_l.copy())
