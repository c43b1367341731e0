"""Shared scenario factories and session-scoped simulation records."""
import dataclasses
import time

import numpy as np
import pytest

from gvfsim import GainSet, Scenario, builtin_ellipse, load_bundled, run


def planar_static_scenario(
    g=1.0,
    kc=0.0,
    t_end=2.0,
    agents=((2.0, 1.0), (1.0, -2.0)),
    thetas=None,
    error_weight=1.0,
    dt=1e-3,
    stride=10,
):
    """Two agents on the ellipse in a static frame; graph only when kc > 0."""
    from gvfsim import CommGraph, FormationPattern

    agents = np.atleast_2d(np.array(agents, dtype=float))
    n_agents = agents.shape[0]
    if thetas is None:
        thetas = np.zeros(n_agents)
    graph = pattern = None
    if kc > 0:
        graph = CommGraph.chain(n_agents)
        pattern = FormationPattern(np.array([np.pi / 4] + [0.0] * (n_agents - 1)))
    return Scenario(
        name="static-test",
        path=builtin_ellipse(),
        transform_kind="static",
        target=None,
        initial_positions=agents,
        initial_thetas=np.asarray(thetas, dtype=float),
        gains=GainSet.uniform(2, error_weight=error_weight, consensus_gain=kc, parameter_gain=g),
        graph=graph,
        pattern=pattern,
        dt=dt,
        t_end=t_end,
        record_stride=stride,
    )


def sim1_scenario(**overrides):
    sc = load_bundled("sim1")
    return dataclasses.replace(sc, **overrides) if overrides else sc


def sim2_scenario(**overrides):
    sc = load_bundled("sim2")
    return dataclasses.replace(sc, **overrides) if overrides else sc


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile both kernel backends outside any timed region."""
    sc = sim1_scenario(t_end=0.01)
    run(sc, backend="numpy")
    try:
        run(sc, backend="numba")
    except ValueError:
        pass
    return True


@pytest.fixture(scope="session")
def sim1_run(warm_kernels):
    """Full 30 s bundled planar run plus its wall time, s."""
    sc = sim1_scenario()
    t0 = time.perf_counter()
    record = run(sc)
    wall = time.perf_counter() - t0
    return record, wall


@pytest.fixture(scope="session")
def sim2_run(warm_kernels):
    """Full 60 s bundled spatial run plus its wall time, s."""
    sc = sim2_scenario()
    t0 = time.perf_counter()
    record = run(sc)
    wall = time.perf_counter() - t0
    return record, wall
