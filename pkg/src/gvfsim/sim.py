"""Scenario assembly, the fixed-step swarm simulator, and run metrics.

A scenario couples one desired path (in a possibly moving frame) with N agents
and an optional consensus layer.  The run integrates target and agents together
with classical RK4 at a shared fixed step: every stage re-evaluates the full
swarm right-hand side at the stage state, so the coupling through parameter
consensus is exact to the integrator's order, not operator-split.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Any

import numpy as np

from . import backend as backend_mod
from .coop import CommGraph, FormationPattern, gain_gate
from .errors import DivergenceError, EulerSingularityError
from .field import GainSet
from .frames import (
    AircraftTarget,
    FrameTransform,
    PlanarTargetTransform,
    SpatialTargetTransform,
    StaticTransform,
    UnicycleTarget,
    euler_xyz_matrix,
    rot2,
    se2_transform,
    se3_euler_transform,
)
from .integrate import rk4_step  # re-exported: part of this module's API
from .lowering import (
    STATUS_DIVERGED,
    STATUS_EULER_SINGULAR,
    TRANSFORM_CODES,
    lower_scenario,
)
from .paths import ParametricPath

__all__ = [
    "Scenario",
    "TrajectoryRecord",
    "RunMetrics",
    "run",
    "metrics",
    "rk4_step",
    "swarm_derivative",
]


@dataclass(eq=False)
class Scenario:
    """Complete description of one simulation run."""

    name: str
    path: ParametricPath
    transform_kind: str  # 'static' | 'se2_unicycle' | 'se3_euler'
    target: UnicycleTarget | AircraftTarget | None
    initial_positions: np.ndarray  # (N, n) inertial, m
    initial_thetas: np.ndarray  # (N,)
    gains: GainSet
    graph: CommGraph | None = None
    pattern: FormationPattern | None = None
    dt: float = 1e-3  # s
    t_end: float = 30.0  # s
    record_stride: int = 10
    t_start: float = 0.0  # s
    output_basename: str | None = None  # stem for CSV files; defaults to name

    def __post_init__(self):
        if self.output_basename is None:
            self.output_basename = self.name
        n = self.path.dim
        pos = np.atleast_2d(np.asarray(self.initial_positions, dtype=float))
        thetas = np.atleast_1d(np.asarray(self.initial_thetas, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != n:
            raise ValueError(f"initial_positions must have shape (N, {n})")
        if thetas.shape != (pos.shape[0],):
            raise ValueError("initial_thetas must have one entry per agent")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(thetas))):
            raise ValueError("initial conditions must be finite")
        self.initial_positions = pos
        self.initial_thetas = thetas

        if self.transform_kind not in TRANSFORM_CODES:
            raise ValueError(f"unknown transform kind {self.transform_kind!r}")
        if self.transform_kind == "static":
            if self.target is not None:
                raise ValueError("static transform takes no target")
        elif self.transform_kind == "se2_unicycle":
            if not isinstance(self.target, UnicycleTarget) or n != 2:
                raise ValueError("se2_unicycle needs a UnicycleTarget and a 2-D path")
        else:
            if not isinstance(self.target, AircraftTarget) or n != 3:
                raise ValueError("se3_euler needs an AircraftTarget and a 3-D path")

        if self.gains.dim != n:
            raise ValueError(f"gains are {self.gains.dim}-dimensional, path is {n}-dimensional")
        if (self.graph is None) != (self.pattern is None):
            raise ValueError("graph and pattern must be given together")
        if self.graph is not None:
            if self.graph.num_agents != self.num_agents or self.pattern.num_agents != self.num_agents:
                raise ValueError("graph and pattern sizes must match the number of agents")
            gain_gate(self.gains, coordination=True)

        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive")
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if int(self.record_stride) < 1:
            raise ValueError("record_stride must be >= 1")
        self.record_stride = int(self.record_stride)

    @property
    def num_agents(self) -> int:
        return self.initial_positions.shape[0]

    @property
    def spatial_dim(self) -> int:
        return self.path.dim

    def transform(self) -> FrameTransform:
        """Construct (and self-check) the frame transform for this scenario."""
        if self.transform_kind == "static":
            return StaticTransform(self.spatial_dim)
        if self.transform_kind == "se2_unicycle":
            return se2_transform(self.target)
        return se3_euler_transform(self.target)


@dataclass(eq=False)
class TrajectoryRecord:
    """Sampled run output.  S samples, N agents, E edges; theta columns included."""

    t: np.ndarray  # (S,)
    x_inertial: np.ndarray  # (S, N, n)
    x_path_frame: np.ndarray  # (S, N, n)
    theta: np.ndarray  # (S, N)
    target_state: np.ndarray  # (S, zdim)
    lyapunov: np.ndarray  # (S, N) per-agent V
    error_norm: np.ndarray  # (S, N) per-agent |phi|
    edge_errors: np.ndarray  # (S, E) theta_i - theta_j - offset(i, j)
    composite: np.ndarray  # (S,) swarm function (equals sum of V when no graph)
    edges: tuple[tuple[int, int], ...]
    header: dict[str, Any] = dataclass_field(default_factory=dict)

    @property
    def num_samples(self) -> int:
        return self.t.size

    @property
    def num_agents(self) -> int:
        return self.theta.shape[1]

    def extended_states(self, sample: int) -> np.ndarray:
        """Path-frame extended states (N, n+1) at one sample index."""
        return np.hstack([self.x_path_frame[sample], self.theta[sample][:, np.newaxis]])


def _sample_count(n_steps: int, stride: int) -> int:
    extra = 0 if n_steps % stride == 0 else 1
    return 1 + n_steps // stride + extra


def run(scenario: Scenario, backend: str | None = None, extra_header: dict | None = None) -> TrajectoryRecord:
    """Integrate a scenario and return its sampled record.

    Raises DivergenceError if any state magnitude exceeds 1e6 and
    EulerSingularityError if the target attitude enters the guard band.
    """
    lowered = lower_scenario(scenario)
    n_steps = int(round((scenario.t_end - scenario.t_start) / scenario.dt))
    if n_steps < 1:
        raise ValueError("run is shorter than one step")
    stride = scenario.record_stride
    samples = _sample_count(n_steps, stride)
    out_t = np.empty(samples)
    out_y = np.empty((samples, lowered.y0.size))

    resolved = backend_mod.resolve_backend(backend)
    kern = backend_mod.kernels(resolved)
    status, filled, step = kern.integrate(
        lowered.y0, scenario.t_start, scenario.dt, n_steps, stride,
        *lowered.kernel_args(), out_t, out_y,
    )
    if status == STATUS_DIVERGED:
        t_fail = scenario.t_start + (step + 1) * scenario.dt
        raise DivergenceError(
            f"state magnitude exceeded 1e6 at t={t_fail:.6g} s", time=t_fail
        )
    if status == STATUS_EULER_SINGULAR:
        t_fail = scenario.t_start + step * scenario.dt
        raise EulerSingularityError(
            f"target pitch entered the singularity guard band near t={t_fail:.6g} s"
        )
    assert filled == samples, "sample bookkeeping mismatch"

    return _postprocess(scenario, lowered, out_t, out_y, resolved, extra_header)


def _postprocess(scenario, lowered, out_t, out_y, backend_name, extra_header):
    n = lowered.spatial_dim
    num_agents = lowered.num_agents
    zdim = lowered.zeta_dim
    samples = out_t.size

    zeta = out_y[:, :zdim]
    states = out_y[:, zdim:].reshape(samples, num_agents, n + 1)
    x_inertial = states[..., :n].copy()
    theta = states[..., n].copy()

    if lowered.transform_kind == 0:
        x_path = x_inertial.copy()
    elif lowered.transform_kind == 1:
        rots = rot2(zeta[:, 2])  # (S, 2, 2) frame -> inertial
        rel = x_inertial - zeta[:, np.newaxis, :2]
        x_path = np.einsum("sba,sib->sia", rots, rel)
    else:
        rots = euler_xyz_matrix(zeta[:, 3:6])
        rel = x_inertial - zeta[:, np.newaxis, :3]
        x_path = np.einsum("sba,sib->sia", rots, rel)

    f = scenario.path.sample(theta)
    phi = x_path - f
    weighted = scenario.gains.error_weights * phi
    lyap = 0.5 * np.sum(weighted * phi, axis=-1)
    err_norm = np.linalg.norm(phi, axis=-1)

    if scenario.graph is not None:
        offsets = scenario.pattern.edge_offsets(scenario.graph)
        edge_errors = theta @ scenario.graph.incidence - offsets
        tilde = theta - scenario.pattern.theta_star
        quad = np.einsum("si,ij,sj->s", tilde, scenario.graph.laplacian, tilde)
        composite = lyap.sum(axis=1) + 0.5 * scenario.gains.consensus_gain * quad
        edges = scenario.graph.edges
    else:
        edge_errors = np.zeros((samples, 0))
        composite = lyap.sum(axis=1)
        edges = ()

    header = {
        "name": scenario.name,
        "spatial_dim": n,
        "num_agents": num_agents,
        "transform_kind": scenario.transform_kind,
        "dt_s": scenario.dt,
        "t_start_s": scenario.t_start,
        "t_end_s": scenario.t_end,
        "record_stride": scenario.record_stride,
        "parameter_gain": scenario.gains.parameter_gain,
        "consensus_gain": scenario.gains.consensus_gain,
        "orientation": scenario.gains.orientation,
        "backend": backend_name,
    }
    if extra_header:
        header.update(extra_header)

    return TrajectoryRecord(
        t=out_t.copy(),
        x_inertial=x_inertial,
        x_path_frame=x_path,
        theta=theta,
        target_state=zeta.copy(),
        lyapunov=lyap,
        error_norm=err_norm,
        edge_errors=edge_errors,
        composite=composite,
        edges=edges,
        header=header,
    )


def swarm_derivative(scenario: Scenario, t: float, y: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Full right-hand side at a packed state y = (target state, agent states).

    Diagnostic/test hook into the kernel; raises the same errors as `run`.
    """
    lowered = lower_scenario(scenario)
    kern = backend_mod.kernels(backend)
    status, ydot = kern.eval_rhs(float(t), np.asarray(y, dtype=float), *lowered.kernel_args())
    if status == STATUS_EULER_SINGULAR:
        raise EulerSingularityError("target pitch inside the singularity guard band")
    return ydot


@dataclass(frozen=True)
class RunMetrics:
    """Headline numbers of a finished run."""

    final_error_sq: np.ndarray  # (N,) |phi|^2 at the last sample
    max_error_sq: np.ndarray  # (N,) worst |phi|^2 over the run
    final_edge_errors: np.ndarray  # (E,)
    time_to_tolerance: float | None  # earliest time after which both tolerances hold
    max_composite_increase: float  # worst single-sample rise of the swarm function


def metrics(record: TrajectoryRecord, phi_tol: float = 1e-2, edge_tol: float = 1e-2) -> RunMetrics:
    """Summarize a record; tolerances define `time_to_tolerance`."""
    err_sq = record.error_norm**2
    ok_phi = np.all(record.error_norm <= phi_tol, axis=1)
    if record.edge_errors.shape[1]:
        ok_edge = np.all(np.abs(record.edge_errors) <= edge_tol, axis=1)
    else:
        ok_edge = np.ones(record.num_samples, dtype=bool)
    ok = ok_phi & ok_edge
    # earliest sample from which every later sample satisfies both tolerances
    suffix_ok = np.logical_and.accumulate(ok[::-1])[::-1]
    t_tol = float(record.t[np.argmax(suffix_ok)]) if suffix_ok.any() else None

    rises = np.diff(record.composite)
    return RunMetrics(
        final_error_sq=err_sq[-1].copy(),
        max_error_sq=err_sq.max(axis=0),
        final_edge_errors=record.edge_errors[-1].copy(),
        time_to_tolerance=t_tol,
        max_composite_increase=float(rises.max()) if rises.size else 0.0,
    )
