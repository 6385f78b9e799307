"""Problem instances: physical parameters, time discretization, and plans.

A scenario fixes everything about one optimization instance: the fleet
(endpoints, boundary velocities, task sizes), the channel (reference SNR at
1 m, bandwidth, altitude), the energy coefficients, and the horizon.  The
horizon T is split into N+1 slots of length delta, giving N+2 grid points
indexed 0..N+1; uplink transmission happens in slots 1..N-1 and the TBS
processes received bits with a one-slot delay.

The reference SNR gamma0 folds the channel gain at 1 m and the noise power
into a single dimensionless ratio; they never appear separately in any
formula, so they are not configured separately.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

# Scenario JSON schema: exactly these top-level keys ("g" may be omitted and
# defaults to 9.8).  Unknown keys are rejected to guard against silent typos.
_TOP_KEYS = {
    "K", "T", "delta", "H", "B", "gamma0", "P_max", "V_max", "a_max",
    "c1", "c2", "g", "G", "E_total", "w", "uavs",
}
_UAV_KEYS = {"q_I", "q_F", "v_I", "v_F", "L"}

DEFAULT_GRAVITY = 9.8


class ScenarioError(ValueError):
    """Raised when a scenario document violates the schema or an invariant.

    ``violations`` lists every violated invariant by name so a bad file can
    be fixed in one pass.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario: " + "; ".join(self.violations))


def _vec2(x, name, violations):
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        violations.append(f"{name} not numeric")
        return np.zeros(2)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        violations.append(f"{name} not a finite 2-vector")
        return np.zeros(2)
    return arr


@dataclass(frozen=True)
class UavSpec:
    """Endpoints, boundary velocities and task size of one UAV."""

    q_init: np.ndarray
    q_final: np.ndarray
    v_init: np.ndarray
    v_final: np.ndarray
    task_bits: float

    def __post_init__(self):
        for name in ("q_init", "q_final", "v_init", "v_final"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical and algorithmic parameters of one instance (SI units)."""

    num_uavs: int
    horizon: float          # T, seconds
    slot: float             # delta, seconds
    altitude: float         # H, meters
    bandwidth: float        # B, Hz
    ref_snr: float          # gamma0, linear SNR at 1 m (dimensionless)
    max_power: float        # P_max, Watts
    max_speed: float        # V_max, m/s
    max_accel: float        # a_max, m/s^2
    prop_c1: float
    prop_c2: float
    gravity: float
    comp_coeff: float       # G, effective switched capacitance
    tbs_budget: float       # E_total, Joules
    tbs_position: np.ndarray
    uavs: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.tbs_position, dtype=float).copy()
        w.setflags(write=False)
        object.__setattr__(self, "tbs_position", w)
        object.__setattr__(self, "uavs", tuple(self.uavs))
        violations = validate(self)
        if violations:
            raise ScenarioError(violations)
        speeds = [np.linalg.norm(u.v_init) - np.linalg.norm(u.v_final)
                  for u in self.uavs]
        if any(abs(s) > 1e-9 for s in speeds):
            warnings.warn(
                "boundary speed differs between start and end; the kinetic "
                "energy change is still excluded from all objectives",
                stacklevel=3,
            )

    @property
    def num_slots(self) -> int:
        """N: index of the last slot used for flying; grid is 0..N+1."""
        return discretize(self.horizon, self.slot)

    @property
    def task_bits(self) -> np.ndarray:
        return np.array([u.task_bits for u in self.uavs])

    def to_dict(self) -> dict:
        return {
            "K": self.num_uavs,
            "T": self.horizon,
            "delta": self.slot,
            "H": self.altitude,
            "B": self.bandwidth,
            "gamma0": self.ref_snr,
            "P_max": self.max_power,
            "V_max": self.max_speed,
            "a_max": self.max_accel,
            "c1": self.prop_c1,
            "c2": self.prop_c2,
            "g": self.gravity,
            "G": self.comp_coeff,
            "E_total": self.tbs_budget,
            "w": list(self.tbs_position),
            "uavs": [
                {
                    "q_I": list(u.q_init),
                    "q_F": list(u.q_final),
                    "v_I": list(u.v_init),
                    "v_F": list(u.v_final),
                    "L": u.task_bits,
                }
                for u in self.uavs
            ],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def replace(self, **overrides) -> "ScenarioConfig":
        """New config with some top-level scalars replaced (e.g. budget)."""
        doc = self.to_dict()
        doc.update(overrides)
        return _from_dict(doc)


def discretize(horizon: float, slot: float) -> int:
    """Slot count N for a horizon split into N+1 slots of length ``slot``.

    T/delta must be an integer number of slots; fractional last slots are
    rejected rather than silently truncated.
    """
    if slot <= 0 or horizon <= 0:
        raise ScenarioError(["T/delta positivity"])
    ratio = horizon / slot
    n_slots = round(ratio)
    if abs(ratio - n_slots) > 1e-9 * max(1.0, ratio):
        raise ScenarioError(["T/delta not integral"])
    return int(n_slots) - 1


def validate(cfg: ScenarioConfig) -> list:
    """Collect every violated invariant by name (empty list when valid)."""
    v = []
    if cfg.num_uavs < 1 or cfg.num_uavs != len(cfg.uavs):
        v.append("K")
    if cfg.horizon <= 0:
        v.append("T positive")
    if cfg.slot <= 0:
        v.append("delta positive")
    if cfg.horizon > 0 and cfg.slot > 0:
        ratio = cfg.horizon / cfg.slot
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            v.append("T/delta not integral")
        elif round(ratio) < 3:
            v.append("T/delta >= 3")
    for name, val in (
        ("H", cfg.altitude), ("B", cfg.bandwidth), ("gamma0", cfg.ref_snr),
        ("P_max", cfg.max_power), ("V_max", cfg.max_speed),
        ("a_max", cfg.max_accel), ("G", cfg.comp_coeff),
    ):
        if not (val > 0 and math.isfinite(val)):
            v.append(f"{name} positive")
    if not (cfg.tbs_budget >= 0 and math.isfinite(cfg.tbs_budget)):
        v.append("E_total nonnegative")
    if not (cfg.gravity > 0):
        v.append("g positive")
    if cfg.tbs_position.shape != (2,):
        v.append("w not a 2-vector")
    for k, uav in enumerate(cfg.uavs):
        if uav.task_bits < 0 or not math.isfinite(uav.task_bits):
            v.append(f"L nonnegative[{k}]")
        if np.linalg.norm(uav.v_init) > cfg.max_speed + 1e-9:
            v.append(f"v_I speed[{k}]")
        if np.linalg.norm(uav.v_final) > cfg.max_speed + 1e-9:
            v.append(f"v_F speed[{k}]")
        # Necessary condition only; full kinematic feasibility is the
        # solver phase-I's job.
        dist = np.linalg.norm(np.asarray(uav.q_final) - np.asarray(uav.q_init))
        if cfg.horizon > 0 and dist > cfg.max_speed * cfg.horizon + 1e-9:
            v.append(f"reachability[{k}]")
    return v


def _from_dict(doc: dict) -> ScenarioConfig:
    violations = []
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        violations.append("unknown keys: " + ", ".join(sorted(unknown)))
    missing = _TOP_KEYS - set(doc) - {"g"}
    if missing:
        violations.append("missing keys: " + ", ".join(sorted(missing)))
    if violations:
        raise ScenarioError(violations)

    uavs = []
    for k, u in enumerate(doc["uavs"]):
        bad = (set(u) - _UAV_KEYS) | (_UAV_KEYS - set(u))
        if bad:
            violations.append(f"uav[{k}] keys: " + ", ".join(sorted(bad)))
            continue
        uavs.append(UavSpec(
            q_init=_vec2(u["q_I"], f"uav[{k}].q_I", violations),
            q_final=_vec2(u["q_F"], f"uav[{k}].q_F", violations),
            v_init=_vec2(u["v_I"], f"uav[{k}].v_I", violations),
            v_final=_vec2(u["v_F"], f"uav[{k}].v_F", violations),
            task_bits=float(u["L"]),
        ))
    if violations:
        raise ScenarioError(violations)

    return ScenarioConfig(
        num_uavs=int(doc["K"]),
        horizon=float(doc["T"]),
        slot=float(doc["delta"]),
        altitude=float(doc["H"]),
        bandwidth=float(doc["B"]),
        ref_snr=float(doc["gamma0"]),
        max_power=float(doc["P_max"]),
        max_speed=float(doc["V_max"]),
        max_accel=float(doc["a_max"]),
        prop_c1=float(doc["c1"]),
        prop_c2=float(doc["c2"]),
        gravity=float(doc.get("g", DEFAULT_GRAVITY)),
        comp_coeff=float(doc["G"]),
        tbs_budget=float(doc["E_total"]),
        tbs_position=_vec2(doc["w"], "w", violations),
        uavs=tuple(uavs),
    )


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"parse error: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ScenarioError(["document is not an object"])
    return _from_dict(doc)


def load_scenario_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


@dataclass
class TrajectoryPlan:
    """Discretized per-UAV position/velocity/acceleration sequences.

    Arrays have shape (K, N+2, 2) over grid points 0..N+1.  The kinematic
    recursion q[n+1] = q[n] + v[n] d + a[n] d^2 / 2, v[n+1] = v[n] + a[n] d
    holds exactly for n in 0..N.
    """

    q: np.ndarray
    v: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.a = np.asarray(self.a, dtype=float)

    @property
    def num_uavs(self) -> int:
        return self.q.shape[0]

    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.v, axis=2)

    def accels(self) -> np.ndarray:
        return np.linalg.norm(self.a, axis=2)

    def kinematics_residual(self, delta: float) -> float:
        """Worst absolute defect of the kinematic recursion, in meters."""
        d = delta
        rq = self.q[:, 1:] - (self.q[:, :-1] + self.v[:, :-1] * d
                              + 0.5 * self.a[:, :-1] * d * d)
        rv = self.v[:, 1:] - (self.v[:, :-1] + self.a[:, :-1] * d)
        return max(np.abs(rq).max(), np.abs(rv).max() * d)

    def check(self, cfg: ScenarioConfig, tol: float = 1e-6) -> list:
        """Violated trajectory invariants by name, scaled tolerances."""
        v = []
        if self.kinematics_residual(cfg.slot) > tol * max(1.0, cfg.max_speed):
            v.append("kinematics")
        for k, uav in enumerate(cfg.uavs):
            if np.abs(self.q[k, 0] - uav.q_init).max() > tol:
                v.append(f"q_I boundary[{k}]")
            if np.abs(self.q[k, -1] - uav.q_final).max() > tol:
                v.append(f"q_F boundary[{k}]")
            if np.abs(self.v[k, 0] - uav.v_init).max() > tol:
                v.append(f"v_I boundary[{k}]")
            if np.abs(self.v[k, -1] - uav.v_final).max() > tol:
                v.append(f"v_F boundary[{k}]")
        n_last = self.q.shape[1] - 2  # grid point N
        spd = self.speeds()[:, : n_last + 1]
        acc = self.accels()[:, : n_last + 1]
        if spd.max() > cfg.max_speed * (1 + tol):
            v.append("max speed")
        if acc.max() > cfg.max_accel * (1 + tol):
            v.append("max accel")
        return v

    def copy(self) -> "TrajectoryPlan":
        return TrajectoryPlan(self.q.copy(), self.v.copy(), self.a.copy())


@dataclass
class OffloadPlan:
    """Bit schedule, partition, powers and (One-by-One) slot ownership.

    ``uplink_bits[k, i]`` is L_k[n] at slot n = i + 1 (i in 0..N-2) and
    ``processed_bits[k, i]`` is the TBS workload L_{u,k}[n+1] for the same i,
    reflecting the one-slot processing delay.  ``schedule`` is identically 1
    except under One-by-One access.
    """

    uplink_bits: np.ndarray
    processed_bits: np.ndarray
    partition: np.ndarray          # rho_k in [0, 1]
    power: np.ndarray              # Watts, same slot indexing as uplink_bits
    schedule: np.ndarray

    def __post_init__(self):
        self.uplink_bits = np.asarray(self.uplink_bits, dtype=float)
        self.processed_bits = np.asarray(self.processed_bits, dtype=float)
        self.partition = np.asarray(self.partition, dtype=float)
        self.power = np.asarray(self.power, dtype=float)
        self.schedule = np.asarray(self.schedule, dtype=float)

    @classmethod
    def all_local(cls, cfg: ScenarioConfig) -> "OffloadPlan":
        """The trivially feasible plan: everything computed on board."""
        k, m = cfg.num_uavs, cfg.num_slots - 1
        return cls(np.zeros((k, m)), np.zeros((k, m)), np.ones(k),
                   np.zeros((k, m)), np.ones((k, m)))

    def check(self, cfg: ScenarioConfig, tol: float = 1e-6) -> list:
        """Violated offload invariants by name; tolerances scaled by bits."""
        v = []
        scale = max(1.0, float(cfg.task_bits.max()))
        cum_up = np.cumsum(self.uplink_bits, axis=1)
        cum_proc = np.cumsum(self.processed_bits, axis=1)
        if (cum_proc - cum_up).max() > tol * scale:
            v.append("bit causality")
        total = (1.0 - self.partition) * cfg.task_bits
        if np.abs(self.uplink_bits.sum(axis=1) - total).max() > tol * scale:
            v.append("uplink total")
        if np.abs(self.processed_bits.sum(axis=1) - total).max() > tol * scale:
            v.append("processed total")
        if self.uplink_bits.min() < -tol * scale:
            v.append("uplink nonnegative")
        if self.processed_bits.min() < -tol * scale:
            v.append("processed nonnegative")
        if self.partition.min() < -tol or self.partition.max() > 1 + tol:
            v.append("partition range")
        if self.power.min() < -tol or self.power.max() > cfg.max_power * (1 + tol):
            v.append("power range")
        if self.schedule.sum(axis=0).max() > 1 + tol:
            v.append("schedule at most one")
        return v

    def copy(self) -> "OffloadPlan":
        return OffloadPlan(self.uplink_bits.copy(), self.processed_bits.copy(),
                           self.partition.copy(), self.power.copy(),
                           self.schedule.copy())


def _min_effort_accel(q_i, q_f, v_i, v_f, n_pts: int, delta: float):
    """Accelerations a[0..N] minimizing sum ||a||^2 under the boundary rows.

    The two boundary conditions are linear in a, so the least-norm solution
    lies in the span of their coefficient patterns: a[j] = c1 + c2 (N+1/2-j).
    """
    j = np.arange(n_pts)
    u1 = np.ones(n_pts)
    u2 = n_pts - 0.5 - j
    gram = np.array([[u1 @ u1, u1 @ u2], [u2 @ u1, u2 @ u2]])
    a = np.zeros((n_pts, 2))
    for dim in range(2):
        b1 = (v_f[dim] - v_i[dim]) / delta
        b2 = (q_f[dim] - q_i[dim] - n_pts * delta * v_i[dim]) / delta ** 2
        c = np.linalg.solve(gram, np.array([b1, b2]))
        a[:, dim] = c[0] * u1 + c[1] * u2
    return a


def _rollout(q_i, v_i, a: np.ndarray, delta: float):
    """Integrate the exact discrete kinematics from (q_i, v_i) under a."""
    n_pts = a.shape[0]
    q = np.zeros((n_pts + 1, 2))
    v = np.zeros((n_pts + 1, 2))
    q[0], v[0] = q_i, v_i
    for n in range(n_pts):
        q[n + 1] = q[n] + v[n] * delta + 0.5 * a[n] * delta ** 2
        v[n + 1] = v[n] + a[n] * delta
    return q, v


def straight_line_init(cfg: ScenarioConfig) -> TrajectoryPlan:
    """Kinematically exact interpolation of every UAV's endpoints.

    Uses the minimum-effort acceleration profile, which reduces to constant
    velocity (a = 0) whenever the endpoints admit it.  The result seeds the
    SCA iteration, so it must satisfy every trajectory invariant.
    """
    n = cfg.num_slots
    n_pts = n + 1  # accelerations a[0..N]
    q_all = np.zeros((cfg.num_uavs, n + 2, 2))
    v_all = np.zeros((cfg.num_uavs, n + 2, 2))
    a_all = np.zeros((cfg.num_uavs, n + 2, 2))
    for k, uav in enumerate(cfg.uavs):
        a = _min_effort_accel(uav.q_init, uav.q_final, uav.v_init,
                              uav.v_final, n_pts, cfg.slot)
        q, v = _rollout(uav.q_init, uav.v_init, a, cfg.slot)
        q_all[k], v_all[k] = q, v
        a_all[k, :n_pts] = a
    plan = TrajectoryPlan(q_all, v_all, a_all)
    bad = plan.check(cfg, tol=1e-9)
    if bad:
        raise ScenarioError(["initial plan infeasible: " + ", ".join(bad)])
    return plan
