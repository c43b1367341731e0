"""Flattening of scenario objects into the plain arrays the step kernels consume.

Both kernel backends take the exact same argument tuple: trig-term tables for
the path, profile tables for the target inputs, gain diagonals, the Laplacian,
and a packed state vector y = (target state, agent states row-major).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import AircraftTarget, TimeProfile, UnicycleTarget
from .paths import ParametricPath

TRANSFORM_CODES = {"static": 0, "se2_unicycle": 1, "se3_euler": 2}
PROFILE_CODES = {"const": 0.0, "sin": 1.0, "cos": 2.0}
STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_EULER_SINGULAR = 2
STATE_BOUND = 1e6


@dataclass(frozen=True, eq=False)
class LoweredScenario:
    """Array form of a scenario, ready for either kernel backend."""

    spatial_dim: int
    num_agents: int
    zeta_dim: int
    transform_kind: int
    path_terms: np.ndarray  # (n, T, 3) trig coefficients (a, b, k)
    path_counts: np.ndarray  # (n,) int64 used-term counts
    profile_terms: np.ndarray  # (6, P, 4) rows (code, amplitude, frequency, phase)
    profile_counts: np.ndarray  # (6,) int64
    error_weights: np.ndarray  # (n,)
    convergence: np.ndarray  # (n+1,)
    traversal: np.ndarray  # (n+1,)
    consensus_gain: float
    wedge_sign: float  # orientation * (-1)^n
    laplacian: np.ndarray  # (N, N)
    theta_star: np.ndarray  # (N,)
    y0: np.ndarray  # (zeta_dim + N*(n+1),)

    def kernel_args(self) -> tuple:
        """Middle argument block shared by `integrate` and `eval_rhs`."""
        return (
            self.spatial_dim,
            self.num_agents,
            self.zeta_dim,
            self.transform_kind,
            self.path_terms,
            self.path_counts,
            self.profile_terms,
            self.profile_counts,
            self.error_weights,
            self.convergence,
            self.traversal,
            self.consensus_gain,
            self.wedge_sign,
            self.laplacian,
            self.theta_star,
        )


def lower_profile(profile: TimeProfile) -> np.ndarray:
    rows = [
        (PROFILE_CODES[t.kind], t.amplitude, t.frequency, t.phase) for t in profile.terms
    ]
    return np.asarray(rows, dtype=float).reshape(len(rows), 4)


def _pack_profiles(profiles: list[TimeProfile]) -> tuple[np.ndarray, np.ndarray]:
    tables = [lower_profile(p) for p in profiles]
    counts = np.array([t.shape[0] for t in tables], dtype=np.int64)
    width = max(1, int(counts.max()) if len(tables) else 1)
    packed = np.zeros((6, width, 4))
    for ch, table in enumerate(tables):
        packed[ch, : table.shape[0]] = table
    return packed, np.concatenate([counts, np.zeros(6 - len(tables), dtype=np.int64)])


def lower_path(path: ParametricPath) -> tuple[np.ndarray, np.ndarray]:
    if path.trig_terms is None:
        raise ValueError(
            "scenario paths must carry exact trig terms (builtin or trig_path); "
            "arbitrary-callable paths can only be evaluated through the object API"
        )
    terms = np.ascontiguousarray(path.trig_terms, dtype=float)
    counts = np.full(terms.shape[0], terms.shape[1], dtype=np.int64)
    return terms, counts


def lower_scenario(scenario) -> LoweredScenario:
    """Flatten a `sim.Scenario`; import-free of sim to avoid a cycle."""
    path = scenario.path
    n = path.dim
    gains = scenario.gains
    num_agents = scenario.num_agents

    path_terms, path_counts = lower_path(path)

    kind = TRANSFORM_CODES[scenario.transform_kind]
    if kind == 0:
        zeta0 = np.zeros(0)
        profiles: list[TimeProfile] = []
    elif kind == 1:
        target: UnicycleTarget = scenario.target
        zeta0 = target.state_vector()
        profiles = [target.speed, target.turn_rate]
    else:
        target: AircraftTarget = scenario.target
        zeta0 = target.state_vector()
        profiles = list(target.body_velocity) + list(target.body_rates)
    profile_terms, profile_counts = _pack_profiles(profiles)

    if scenario.graph is not None:
        lap = np.ascontiguousarray(scenario.graph.laplacian, dtype=float)
        theta_star = np.ascontiguousarray(scenario.pattern.theta_star, dtype=float)
        kc = gains.consensus_gain
    else:
        lap = np.zeros((num_agents, num_agents))
        theta_star = np.zeros(num_agents)
        kc = 0.0

    states = np.hstack([scenario.initial_positions, scenario.initial_thetas[:, np.newaxis]])
    y0 = np.concatenate([zeta0, states.ravel()])

    return LoweredScenario(
        spatial_dim=n,
        num_agents=num_agents,
        zeta_dim=zeta0.size,
        transform_kind=kind,
        path_terms=path_terms,
        path_counts=path_counts,
        profile_terms=profile_terms,
        profile_counts=profile_counts,
        error_weights=np.ascontiguousarray(gains.error_weights),
        convergence=np.ascontiguousarray(gains.convergence),
        traversal=np.ascontiguousarray(gains.traversal),
        consensus_gain=float(kc),
        wedge_sign=float(gains.orientation) * (-1.0 if n % 2 else 1.0),
        laplacian=lap,
        theta_star=theta_star,
        y0=y0,
    )
