"""Communication graphs, parameter consensus, and the swarm Lyapunov monitor.

Agents coordinate only through their path parameters: each one nudges its
parameter rate by a consensus term built from neighbor differences relative to
a formation pattern of desired offsets.  The combined per-agent field is the
single-agent guidance field plus that scalar correction on the parameter
channel.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import GainValidityError
from .field import FieldOutput, GainSet, lyapunov_value, mpf_field
from .frames import FrameTransform
from .paths import ParametricPath, level_set_errors


class CommGraph:
    """Undirected, connected communication graph over N agents.

    Edges are stored as ordered pairs (i, j) with i < j (0-based); the incidence
    matrix assigns +1 to the smaller endpoint of each edge.
    """

    def __init__(self, num_agents: int, edges):
        if num_agents < 1:
            raise ValueError("need at least one agent")
        seen: set[tuple[int, int]] = set()
        ordered: list[tuple[int, int]] = []
        for raw in edges:
            i, j = int(raw[0]), int(raw[1])
            if i == j:
                raise ValueError(f"self-loop on agent {i}")
            if not (0 <= i < num_agents and 0 <= j < num_agents):
                raise ValueError(f"edge ({i}, {j}) out of range for {num_agents} agents")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            ordered.append(key)
        self.num_agents = int(num_agents)
        self.edges: tuple[tuple[int, int], ...] = tuple(ordered)

        adj = np.zeros((num_agents, num_agents))
        inc = np.zeros((num_agents, len(ordered)))
        for e, (i, j) in enumerate(ordered):
            adj[i, j] = adj[j, i] = 1.0
            inc[i, e] = 1.0
            inc[j, e] = -1.0
        self.adjacency = adj
        self.incidence = inc
        self.laplacian = np.diag(adj.sum(axis=1)) - adj
        if not self._connected():
            raise ValueError("communication graph must be connected")

    def _connected(self) -> bool:
        if self.num_agents == 1:
            return True
        visited = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in range(self.num_agents):
                if self.adjacency[u, v] and v not in visited:
                    visited.add(v)
                    stack.append(v)
        return len(visited) == self.num_agents

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @classmethod
    def chain(cls, num_agents: int) -> "CommGraph":
        """Path graph 0-1-2-...-(N-1)."""
        return cls(num_agents, [(i, i + 1) for i in range(num_agents - 1)])


@dataclass(frozen=True, eq=False)
class FormationPattern:
    """Desired parameter offsets, stored as absolute targets theta*_i.

    The pairwise offset between agents i and j is theta*_i - theta*_j, so the
    pattern is invariant under a common shift of all targets.
    """

    theta_star: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.theta_star, dtype=float)
        if ts.ndim != 1 or not np.all(np.isfinite(ts)):
            raise ValueError("theta_star must be a finite vector")
        object.__setattr__(self, "theta_star", ts)

    @property
    def num_agents(self) -> int:
        return self.theta_star.size

    def offset(self, i: int, j: int) -> float:
        """Desired difference theta_i - theta_j."""
        return float(self.theta_star[i] - self.theta_star[j])

    def edge_offsets(self, graph: CommGraph) -> np.ndarray:
        """Per-edge desired differences, ordered like graph.edges."""
        return self.theta_star @ graph.incidence


def consensus_term(thetas, graph: CommGraph, pattern: FormationPattern) -> np.ndarray:
    """Consensus corrections c = -L (theta - theta*), one per agent.

    Entry i equals -sum over neighbors j of (theta_i - theta_j - offset(i, j)),
    and the entries sum to zero.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (graph.num_agents,) or pattern.num_agents != graph.num_agents:
        raise ValueError("thetas, graph, and pattern must agree on the number of agents")
    return -graph.laplacian @ (thetas - pattern.theta_star)


def coordination_field(
    agent: int,
    thetas,
    graph: CommGraph,
    pattern: FormationPattern,
    consensus_gain: float,
    spatial_dim: int,
) -> np.ndarray:
    """Per-agent coordination field: zero spatial part, consensus on the parameter channel."""
    out = np.zeros(spatial_dim + 1)
    out[-1] = consensus_gain * consensus_term(thetas, graph, pattern)[agent]
    return out


@dataclass(frozen=True)
class GateResult:
    """Outcome of the coordination gain check."""

    case: str  # 'strict' | 'lasalle' | 'unconstrained'
    determinant: float  # g (1 - g), sign diagnoses the coupling definiteness
    parameter_gain: float


def gain_gate(gains: GainSet, coordination: bool) -> GateResult:
    """Validate the parameter-channel convergence gain for the requested mode.

    Coordination couples path-error descent to consensus descent; the coupling
    stays negative semidefinite only for 0 < g <= 1 (strict descent for g < 1,
    invariance argument at g = 1).  Raises GainValidityError otherwise.
    """
    g = gains.parameter_gain
    det = g * (1.0 - g)
    if g <= 0:
        raise GainValidityError(f"parameter convergence gain must be positive, got {g}")
    if not coordination:
        return GateResult("unconstrained", det, g)
    if g > 1.0:
        raise GainValidityError(
            f"coordination requires the parameter convergence gain in (0, 1], got {g}: "
            f"the error/consensus coupling form loses definiteness (g(1-g) = {det:.3f} < 0)"
        )
    return GateResult("lasalle" if g == 1.0 else "strict", det, g)


def combined_field(
    agent: int,
    state,
    t: float,
    thetas,
    path: ParametricPath,
    transform: FrameTransform,
    target,
    gains: GainSet,
    graph: CommGraph,
    pattern: FormationPattern,
) -> FieldOutput:
    """Guidance field plus consensus correction for one agent of a swarm.

    `thetas` is the snapshot of every agent's parameter at this instant; only
    the parameter rate differs from the single-agent field.
    """
    gain_gate(gains, coordination=True)
    base = mpf_field(state, t, path, transform, target, gains)
    correction = gains.consensus_gain * consensus_term(thetas, graph, pattern)[agent]
    return replace(base, parameter_rate=base.parameter_rate + float(correction))


def composite_lyapunov(
    states_path_frame: np.ndarray,
    path: ParametricPath,
    graph: CommGraph,
    pattern: FormationPattern,
    gains: GainSet,
) -> float:
    """Swarm function: summed path errors plus the consensus quadratic.

    sum_i V_i + (consensus_gain / 2) (theta - theta*)^T L (theta - theta*).
    Invariant under a common shift of all parameters and all targets.
    """
    states = np.asarray(states_path_frame, dtype=float)
    n = path.dim
    if states.ndim != 2 or states.shape[1] != n + 1 or states.shape[0] != graph.num_agents:
        raise ValueError(f"states must have shape ({graph.num_agents}, {n + 1})")
    total = 0.0
    for i in range(states.shape[0]):
        errors = level_set_errors(path, states[i, :n], states[i, n])
        total += lyapunov_value(errors.phi, gains.error_weights)
    tilde = states[:, n] - pattern.theta_star
    return float(total + 0.5 * gains.consensus_gain * tilde @ graph.laplacian @ tilde)
