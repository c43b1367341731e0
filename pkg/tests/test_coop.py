import numpy as np
import pytest

from gvfsim.coop import (
    CommGraph,
    FormationPattern,
    combined_field,
    composite_lyapunov,
    consensus_term,
    coordination_field,
    gain_gate,
)
from gvfsim.errors import GainValidityError
from gvfsim.field import GainSet, mpf_field
from gvfsim.frames import StaticTransform
from gvfsim.paths import builtin_ellipse


def test_graph_construction_and_matrices():
    g = CommGraph(3, [(0, 1), (2, 1)])
    assert g.edges == ((0, 1), (1, 2))  # normalized to i < j
    assert g.num_edges == 2
    np.testing.assert_array_equal(g.laplacian, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    np.testing.assert_array_equal(g.incidence, [[1, 0], [-1, 1], [0, -1]])
    # L = B B^T ties the two operators together
    np.testing.assert_array_equal(g.laplacian, g.incidence @ g.incidence.T)
    # constants are in the null space
    np.testing.assert_allclose(g.laplacian @ np.ones(3), np.zeros(3), atol=1e-15)


def test_chain_factory():
    g = CommGraph.chain(4)
    assert g.edges == ((0, 1), (1, 2), (2, 3))
    np.testing.assert_array_equal(np.diag(g.laplacian), [1, 2, 2, 1])


def test_graph_rejections():
    with pytest.raises(ValueError):
        CommGraph(3, [(0, 1)])  # agent 2 isolated
    with pytest.raises(ValueError):
        CommGraph(3, [(0, 0), (1, 2)])  # self-loop
    with pytest.raises(ValueError):
        CommGraph(3, [(0, 1), (1, 0), (1, 2)])  # duplicate edge
    with pytest.raises(ValueError):
        CommGraph(3, [(0, 3), (1, 2)])  # out of range
    with pytest.raises(ValueError):
        CommGraph(4, [(0, 1), (2, 3)])  # two components


def test_single_agent_graph():
    g = CommGraph(1, [])
    assert g.num_edges == 0
    assert g.laplacian.shape == (1, 1)


def test_formation_pattern_offsets():
    pattern = FormationPattern(np.array([np.pi / 4, 0.0]))
    assert pattern.offset(0, 1) == pytest.approx(np.pi / 4)
    assert pattern.offset(1, 0) == pytest.approx(-np.pi / 4)
    g = CommGraph.chain(2)
    np.testing.assert_allclose(pattern.edge_offsets(g), [np.pi / 4])


def test_consensus_term_hand_case():
    g = CommGraph.chain(2)
    pattern = FormationPattern(np.array([np.pi / 4, 0.0]))
    thetas = np.array([1.0, 0.0])
    c = consensus_term(thetas, g, pattern)
    gap = 1.0 - np.pi / 4
    np.testing.assert_allclose(c, [-gap, gap], rtol=1e-14)
    # at the pattern the correction vanishes
    np.testing.assert_allclose(
        consensus_term(np.array([np.pi / 4, 0.0]), g, pattern), [0.0, 0.0], atol=1e-15
    )
    # invariant under a common shift
    np.testing.assert_allclose(consensus_term(thetas + 5.0, g, pattern), c, rtol=1e-12)
    # corrections always sum to zero
    assert float(c.sum()) == pytest.approx(0.0, abs=1e-14)


def test_coordination_field_shape():
    g = CommGraph.chain(3)
    pattern = FormationPattern(np.zeros(3))
    out = coordination_field(1, np.array([0.3, 0.1, -0.2]), g, pattern, 2.0, spatial_dim=2)
    assert out.shape == (3,)
    np.testing.assert_array_equal(out[:2], [0.0, 0.0])
    # c_1 = -( (t1-t0) + (t1-t2) ) = -(-0.2 + 0.3) scaled by the gain
    assert out[2] == pytest.approx(2.0 * -((0.1 - 0.3) + (0.1 + 0.2)), rel=1e-12)


def test_gain_gate_cases():
    assert gain_gate(GainSet.uniform(2, parameter_gain=0.3), coordination=True).case == "strict"
    assert gain_gate(GainSet.uniform(2, parameter_gain=1.0), coordination=True).case == "lasalle"
    assert gain_gate(GainSet.uniform(2, parameter_gain=1.5), coordination=False).case == "unconstrained"

    res = gain_gate(GainSet.uniform(2, parameter_gain=0.3), coordination=True)
    assert res.determinant == pytest.approx(0.3 * 0.7)
    assert gain_gate(GainSet.uniform(2, parameter_gain=1.0), coordination=True).determinant == 0.0

    with pytest.raises(GainValidityError) as exc:
        gain_gate(GainSet.uniform(2, parameter_gain=1.5), coordination=True)
    assert "g(1-g)" in str(exc.value)


def test_combined_field_adds_to_parameter_rate_only():
    path = builtin_ellipse()
    gains = GainSet.uniform(2, consensus_gain=2.0)
    g = CommGraph.chain(2)
    pattern = FormationPattern(np.array([np.pi / 4, 0.0]))
    thetas = np.array([1.0, 0.0])
    state = np.array([3.0, 0.5, 1.0])

    base = mpf_field(state, 0.0, path, StaticTransform(2), None, gains)
    out = combined_field(0, state, 0.0, thetas, path, StaticTransform(2), None, gains, g, pattern)
    np.testing.assert_array_equal(out.velocity, base.velocity)
    expected = base.parameter_rate + 2.0 * consensus_term(thetas, g, pattern)[0]
    assert out.parameter_rate == pytest.approx(expected, rel=1e-14)
    assert out.lyapunov == base.lyapunov


def test_combined_field_enforces_gate():
    path = builtin_ellipse()
    gains = GainSet.uniform(2, consensus_gain=1.0, parameter_gain=1.5)
    g = CommGraph.chain(2)
    pattern = FormationPattern(np.zeros(2))
    with pytest.raises(GainValidityError):
        combined_field(
            0, np.array([3.0, 0.5, 1.0]), 0.0, np.array([1.0, 0.0]), path,
            StaticTransform(2), None, gains, g, pattern,
        )


def test_composite_lyapunov_hand_value():
    path = builtin_ellipse()
    g = CommGraph.chain(2)
    pattern = FormationPattern(np.array([np.pi / 4, 0.0]))
    gains = GainSet.uniform(2, consensus_gain=2.0)
    # both agents on the path: only the consensus quadratic contributes
    states = np.array([[2.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    tilde = np.array([-np.pi / 4, 0.0])
    expected = 0.5 * 2.0 * tilde @ g.laplacian @ tilde
    assert composite_lyapunov(states, path, g, pattern, gains) == pytest.approx(expected, rel=1e-14)

    # moving one agent off the path adds exactly its V
    states_off = states.copy()
    states_off[0, 0] = 3.0
    assert composite_lyapunov(states_off, path, g, pattern, gains) == pytest.approx(
        expected + 0.5, rel=1e-14
    )


def test_composite_shift_invariance():
    path = builtin_ellipse()
    g = CommGraph.chain(3)
    pattern = FormationPattern(np.array([0.4, 0.1, -0.2]))
    gains = GainSet.uniform(2, consensus_gain=1.5)
    rng = np.random.default_rng(31)
    states = np.column_stack([rng.uniform(-3, 3, size=(3, 2)), rng.uniform(-5, 5, size=3)])
    base = composite_lyapunov(states, path, g, pattern, gains)
    shifted = states.copy()
    shifted[:, 2] += 2 * np.pi  # common parameter shift, ellipse is 2*pi periodic
    assert composite_lyapunov(shifted, path, g, pattern, gains) == pytest.approx(base, rel=1e-12)
