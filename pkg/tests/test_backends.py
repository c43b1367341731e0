import numpy as np
import pytest

from conftest import sim1_scenario, sim2_scenario
from gvfsim import backend as backend_mod
from gvfsim.lowering import STATUS_EULER_SINGULAR, STATUS_OK, lower_scenario
from gvfsim.sim import run

numba = pytest.importorskip("numba")


def test_resolve_backend_precedence(monkeypatch):
    monkeypatch.delenv(backend_mod.ENV_VAR, raising=False)
    assert backend_mod.resolve_backend("numpy") == "numpy"
    assert backend_mod.resolve_backend("numba") == "numba"
    assert backend_mod.resolve_backend(None) == "numba"

    monkeypatch.setenv(backend_mod.ENV_VAR, "numpy")
    assert backend_mod.resolve_backend(None) == "numpy"
    # the explicit argument still wins over the environment
    assert backend_mod.resolve_backend("numba") == "numba"

    with pytest.raises(ValueError):
        backend_mod.resolve_backend("fortran")


def test_kernels_cached():
    a = backend_mod.kernels("numpy")
    b = backend_mod.kernels("numpy")
    assert a is b
    assert hasattr(a, "integrate") and hasattr(a, "eval_rhs")


def test_env_flag_reaches_run(monkeypatch):
    monkeypatch.setenv(backend_mod.ENV_VAR, "numpy")
    record = run(sim1_scenario(t_end=0.05))
    assert record.header["backend"] == "numpy"
    monkeypatch.delenv(backend_mod.ENV_VAR)
    record = run(sim1_scenario(t_end=0.05), backend="numba")
    assert record.header["backend"] == "numba"


@pytest.mark.parametrize("factory", [sim1_scenario, sim2_scenario])
def test_eval_rhs_backend_parity(factory):
    scenario = factory()
    lowered = lower_scenario(scenario)
    args = lowered.kernel_args()
    nb = backend_mod.kernels("numba")
    np_mod = backend_mod.kernels("numpy")
    rng = np.random.default_rng(41)
    for _ in range(10):
        y = lowered.y0 + rng.normal(scale=0.3, size=lowered.y0.size)
        t = float(rng.uniform(0.0, 20.0))
        s1, d1 = nb.eval_rhs(t, y, *args)
        s2, d2 = np_mod.eval_rhs(t, y, *args)
        assert s1 == s2 == STATUS_OK
        np.testing.assert_allclose(d1, d2, rtol=1e-12, atol=1e-13)


def test_eval_rhs_singular_status_parity():
    scenario = sim2_scenario()
    lowered = lower_scenario(scenario)
    args = lowered.kernel_args()
    y = lowered.y0.copy()
    y[4] = 1.5  # pitch inside the guard band
    for name in ("numba", "numpy"):
        status, _ = backend_mod.kernels(name).eval_rhs(0.0, y, *args)
        assert status == STATUS_EULER_SINGULAR


@pytest.mark.parametrize("factory", [sim1_scenario, sim2_scenario])
def test_trajectory_backend_agreement(factory):
    scenario = factory(t_end=2.0)
    rec_nb = run(scenario, backend="numba")
    rec_np = run(scenario, backend="numpy")
    np.testing.assert_allclose(rec_nb.x_inertial, rec_np.x_inertial, rtol=0, atol=1e-11)
    np.testing.assert_allclose(rec_nb.theta, rec_np.theta, rtol=0, atol=1e-11)
    np.testing.assert_allclose(rec_nb.composite, rec_np.composite, rtol=1e-9, atol=1e-12)


def test_per_backend_determinism():
    for name in ("numba", "numpy"):
        a = run(sim1_scenario(t_end=0.5), backend=name)
        b = run(sim1_scenario(t_end=0.5), backend=name)
        assert np.array_equal(a.x_inertial, b.x_inertial)
        assert np.array_equal(a.theta, b.theta)
