"""Ground-truth energy evaluators: channel, power, and the three components.

These are the pure reference formulas every optimizer result is audited
against.  The solvers work on convexified surrogates; the numbers reported
to users always come from here.

Accounting windows: communication happens in slots 1..N-1, propulsion is
charged for slots 1..N, and the TBS processes bits in slots 2..N (one slot
behind reception).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scenario import OffloadPlan, ScenarioConfig, TrajectoryPlan

# The flight power model diverges at hover, so speeds below this floor are a
# hard error instead of a silently huge number; the solvers keep speeds at or
# above it through the slack-variable path.
V_FLOOR = 0.1

# Rate exponents past this signal an absurd bit allocation, not a real plan.
_MAX_RATE_EXPONENT = 60.0

SCHEMES = ("tdma", "ofdma", "one-by-one", "noma")


class HoverSingularityError(ValueError):
    pass


class RateOverflowError(OverflowError):
    pass


def inv_snr(q, w, altitude: float, ref_snr: float):
    """Noise-to-received-gain ratio (sigma^2 / h) at position q.

    Works element-wise on arrays of positions with trailing dimension 2.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    d2 = np.sum((q - w) ** 2, axis=-1)
    return (d2 + altitude ** 2) / ref_snr


def required_power(bits, bandwidth_eff: float, time_eff: float, inv_snr_val):
    """Transmit power that delivers ``bits`` in ``time_eff`` seconds.

    Inverts the Shannon rate equation; monotone increasing and convex in the
    bit load.
    """
    bits = np.asarray(bits, dtype=float)
    exponent = bits / (bandwidth_eff * time_eff)
    if np.any(exponent > _MAX_RATE_EXPONENT):
        raise RateOverflowError(
            f"rate exponent overflow: {float(np.max(exponent)):.1f} > "
            f"{_MAX_RATE_EXPONENT}")
    return (np.exp2(exponent) - 1.0) * inv_snr_val


def comm_energy(power, duration: float):
    """Uplink energy of transmitting at ``power`` for ``duration`` seconds."""
    return power * duration


def comp_energy(bits, horizon: float, comp_coeff: float):
    """On-board CPU energy for ``bits`` finished within the whole horizon."""
    bits = np.asarray(bits, dtype=float)
    return comp_coeff * bits ** 3 / horizon ** 2


def propulsion_slot_power(v, a, c1: float, c2: float, gravity: float):
    """Per-slot flight power c1||v||^3 + c2/||v|| (1 + ||a||^2/g^2)."""
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    speed = np.linalg.norm(v, axis=-1)
    acc = np.linalg.norm(a, axis=-1)
    if np.any(speed < V_FLOOR):
        raise HoverSingularityError(
            f"hover singularity: speed {float(np.min(speed)):.4g} m/s below "
            f"floor {V_FLOOR}")
    return c1 * speed ** 3 + (c2 / speed) * (1.0 + acc ** 2 / gravity ** 2)


def propulsion_energy(v, a, c1: float, c2: float, gravity: float,
                      delta: float) -> float:
    """Total flight energy over the given velocity/acceleration samples.

    The kinetic-energy change between the endpoints is excluded, matching
    the objective the solvers minimize.
    """
    return float(np.sum(propulsion_slot_power(v, a, c1, c2, gravity)) * delta)


def kinetic_delta_per_kg(cfg: ScenarioConfig) -> np.ndarray:
    """Endpoint kinetic-energy change per unit mass (J/kg), per UAV.

    Reported for transparency only; the UAV mass is not a model parameter,
    so the absolute change cannot be computed.
    """
    out = np.zeros(cfg.num_uavs)
    for k, u in enumerate(cfg.uavs):
        out[k] = 0.5 * (np.dot(u.v_final, u.v_final)
                        - np.dot(u.v_init, u.v_init))
    return out


@dataclass
class EnergyBreakdown:
    """Per-UAV propulsion/computation/communication energies and totals."""

    fly_J: np.ndarray
    comp_J: np.ndarray
    comm_J: np.ndarray
    total_fly_J: float = field(init=False)
    total_comp_J: float = field(init=False)
    total_comm_J: float = field(init=False)
    total_J: float = field(init=False)

    def __post_init__(self):
        self.fly_J = np.asarray(self.fly_J, dtype=float)
        self.comp_J = np.asarray(self.comp_J, dtype=float)
        self.comm_J = np.asarray(self.comm_J, dtype=float)
        if min(self.fly_J.min(), self.comp_J.min(), self.comm_J.min()) < 0:
            raise ValueError("negative energy component")
        self.total_fly_J = float(self.fly_J.sum())
        self.total_comp_J = float(self.comp_J.sum())
        self.total_comm_J = float(self.comm_J.sum())
        self.total_J = self.total_fly_J + self.total_comp_J + self.total_comm_J

    def per_uav_total(self) -> np.ndarray:
        return self.fly_J + self.comp_J + self.comm_J

    def to_dict(self) -> dict:
        return {
            "fly_J": self.fly_J.tolist(),
            "comp_J": self.comp_J.tolist(),
            "comm_J": self.comm_J.tolist(),
            "total_fly_J": self.total_fly_J,
            "total_comp_J": self.total_comp_J,
            "total_comm_J": self.total_comm_J,
            "total_J": self.total_J,
        }


def scheme_access(scheme: str, cfg: ScenarioConfig):
    """(effective bandwidth, effective transmit time per slot) of a scheme."""
    if scheme == "tdma":
        return cfg.bandwidth, cfg.slot / cfg.num_uavs
    if scheme == "ofdma":
        return cfg.bandwidth / cfg.num_uavs, cfg.slot
    if scheme in ("one-by-one", "noma"):
        return cfg.bandwidth, cfg.slot
    raise ValueError(f"unknown scheme {scheme!r}")


def total_energy(cfg: ScenarioConfig, traj: TrajectoryPlan,
                 plan: OffloadPlan, scheme: str) -> EnergyBreakdown:
    """True total energy of a (trajectory, offload) pair under one scheme.

    The communication term is recomputed from the bit schedule via the
    scheme's effective bandwidth/time, except under NOMA where the stored
    transmit powers are charged directly (rates there depend on interference
    and cannot be inverted per UAV).
    """
    n = cfg.num_slots
    k_num = cfg.num_uavs
    fly = np.zeros(k_num)
    comm = np.zeros(k_num)
    for k in range(k_num):
        fly[k] = propulsion_energy(traj.v[k, 1:n + 1], traj.a[k, 1:n + 1],
                                   cfg.prop_c1, cfg.prop_c2, cfg.gravity,
                                   cfg.slot)
    comp = comp_energy(cfg.task_bits * plan.partition, cfg.horizon,
                       cfg.comp_coeff)

    inv = inv_snr(traj.q[:, 1:n], cfg.tbs_position, cfg.altitude, cfg.ref_snr)
    if scheme == "noma":
        comm = np.sum(plan.power * cfg.slot, axis=1)
    elif scheme == "one-by-one":
        b_eff, t_eff = scheme_access(scheme, cfg)
        active = plan.schedule > 0.5
        bits = np.where(active, plan.uplink_bits, 0.0)
        p = required_power(bits, b_eff, t_eff, inv)
        comm = np.sum(np.where(active, comm_energy(p, t_eff), 0.0), axis=1)
    else:
        b_eff, t_eff = scheme_access(scheme, cfg)
        p = required_power(plan.uplink_bits, b_eff, t_eff, inv)
        comm = np.sum(comm_energy(p, t_eff), axis=1)
    return EnergyBreakdown(fly, comp, comm)
