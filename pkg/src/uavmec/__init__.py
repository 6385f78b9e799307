"""Multi-UAV task offloading energy minimization.

A fleet of UAVs flies between fixed endpoints while splitting a computation
task between on-board processing and uplink offloading to a terrestrial base
station (TBS).  The library jointly optimizes trajectories, bit schedules,
transmit powers and the local/offload split so that total UAV energy
(propulsion + computation + communication) is minimized, under one of four
uplink access schemes: TDMA, OFDMA, One-by-One scheduling, or NOMA.

The non-convex problems are solved by successive convex approximation over a
self-contained log-barrier interior-point solver (:mod:`uavmec.convex`).
"""

from .scenario import (
    ScenarioConfig,
    TrajectoryPlan,
    OffloadPlan,
    UavSpec,
    ScenarioError,
    load_scenario,
    discretize,
    straight_line_init,
)
from .energy import (
    EnergyBreakdown,
    inv_snr,
    required_power,
    comm_energy,
    comp_energy,
    propulsion_energy,
    total_energy,
    V_FLOOR,
)
from .schemes import (
    SolveOptions,
    SolutionBundle,
    solve_tdma,
    solve_ofdma,
    solve_one_by_one,
    solve_noma,
    solve_propulsion_baseline,
    round_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig",
    "TrajectoryPlan",
    "OffloadPlan",
    "UavSpec",
    "ScenarioError",
    "load_scenario",
    "discretize",
    "straight_line_init",
    "EnergyBreakdown",
    "inv_snr",
    "required_power",
    "comm_energy",
    "comp_energy",
    "propulsion_energy",
    "total_energy",
    "V_FLOOR",
    "SolveOptions",
    "SolutionBundle",
    "solve_tdma",
    "solve_ofdma",
    "solve_one_by_one",
    "solve_noma",
    "solve_propulsion_baseline",
    "round_schedule",
    "__version__",
]
