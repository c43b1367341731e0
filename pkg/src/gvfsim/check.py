"""Self-contained property checks behind the `check` CLI subcommand.

Each check re-derives an invariant the library is built on and reports
pass/fail with a one-line numeric detail.  They are deliberately quick:
random sweeps are small and simulation horizons short.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coop import CommGraph, FormationPattern, gain_gate
from .errors import GainValidityError
from .field import GainSet, extended_field, mpf_field, planar_mpf_field
from .frames import TimeProfile, UnicycleTarget, se2_transform, se3_euler_transform
from .integrate import rk4_step
from .linalg import generalized_cross
from .paths import builtin_ellipse, builtin_lissajous, wedge_closed_form
from .sim import Scenario, run

__all__ = ["CheckResult", "run_property_checks", "format_check_table"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _planar_scenario(g=1.0, kc=1.0, t_end=2.0, moving=True) -> Scenario:
    if moving:
        target = UnicycleTarget(
            position=np.zeros(2),
            heading=0.0,
            speed=TimeProfile.constant(1.0),
            turn_rate=TimeProfile.sinusoid(0.5, 1.0),
        )
        kind = "se2_unicycle"
    else:
        target, kind = None, "static"
    return Scenario(
        name="check",
        path=builtin_ellipse(),
        transform_kind=kind,
        target=target,
        initial_positions=np.array([[2.0, 1.0], [1.0, -2.0]]),
        initial_thetas=np.zeros(2),
        gains=GainSet.uniform(2, consensus_gain=kc, parameter_gain=g),
        graph=CommGraph(2, [(0, 1)]),
        pattern=FormationPattern(np.array([np.pi / 4, 0.0])),
        t_end=t_end,
    )


def _check_wedge_orthogonality(rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 5))
        vectors = rng.normal(size=(n, n + 1))
        out = generalized_cross(vectors)
        worst = max(worst, float(np.max(np.abs(vectors @ out))))
    return worst < 1e-10, f"max |dot| {worst:.2e} over 500 random stacks (tol 1e-10)"


def _check_cross_match(rng) -> tuple[bool, str]:
    a, b = rng.normal(size=(2, 400, 3))
    ours = np.array([generalized_cross(np.stack([u, v])) for u, v in zip(a, b)])
    exact = np.array_equal(ours, np.cross(a, b))
    return exact, "bitwise equality with np.cross on 400 pairs" if exact else "mismatch vs np.cross"


def _check_wedge_closed_form(rng) -> tuple[bool, str]:
    worst = 0.0
    for path in (builtin_ellipse(), builtin_lissajous()):
        for theta in rng.uniform(-8, 8, size=50):
            grads = np.hstack([np.eye(path.dim), -path.derivative(theta)[:, None]])
            worst = max(
                worst,
                float(np.max(np.abs(generalized_cross(grads) - wedge_closed_form(path, theta)))),
            )
    return worst < 1e-12, f"max |generic - closed form| {worst:.2e} (tol 1e-12)"


def _check_nonvanishing(rng) -> tuple[bool, str]:
    lo = np.inf
    for path in (builtin_ellipse(), builtin_lissajous()):
        gains = GainSet.uniform(path.dim)
        for _ in range(400):
            x = rng.uniform(-4, 4, size=path.dim)
            theta = float(rng.uniform(-8, 8))
            w = extended_field(path, x, theta, gains)
            lo = min(lo, float(np.linalg.norm(w)))
    return lo >= 1.0 - 1e-9, f"min |w| {lo:.12f} over 800 random states (must be >= 1 - 1e-9)"


def _check_lyapunov_descent() -> tuple[bool, str]:
    from .field import lyapunov_rate_report

    # consensus off: the descent identity describes the uncoupled flow
    record = run(_planar_scenario(kc=0.0, moving=False, t_end=2.0))
    states = np.concatenate([record.x_path_frame[:, 0], record.theta[:, 0:1]], axis=1)
    report = lyapunov_rate_report(record.t, states, builtin_ellipse(), GainSet.uniform(2))
    ok = report.mode == "identity" and report.max_residual < 1e-3 * (1.0 + float(np.max(report.gradient_sq)))
    return ok, f"max |dV/dt + |grad V|^2| residual {report.max_residual:.2e}"


def _check_transform_self_tests() -> tuple[bool, str]:
    target = UnicycleTarget(
        position=np.array([1.0, -2.0]),
        heading=0.7,
        speed=TimeProfile.constant(1.3),
        turn_rate=TimeProfile.sinusoid(0.4, 0.9),
    )
    se2_transform(target)  # raises on drift/jacobian mismatch
    from .frames import AircraftTarget

    aircraft = AircraftTarget(
        position=np.array([0.0, 0.0, 1.0]),
        euler=np.array([0.05, -0.1, np.pi / 4]),
        body_velocity=(
            TimeProfile.constant(1.0),
            TimeProfile.sinusoid(0.1, 1.0, kind="cos"),
            TimeProfile.sinusoid(0.1, 1.0),
        ),
        body_rates=(
            TimeProfile.sinusoid(0.01, 1.0),
            TimeProfile.sinusoid(0.01, 1.0),
            TimeProfile.sinusoid(0.01, 1.0),
        ),
    )
    se3_euler_transform(aircraft)
    return True, "drift and jacobian agree with finite differences (se2 and se3)"


def _check_rk4_order() -> tuple[bool, str]:
    f = lambda t, y: y
    y0 = np.array([1.0])

    def err(dt):
        y, t = y0, 0.0
        for _ in range(round(0.5 / dt)):
            y = rk4_step(y, t, dt, f)
            t += dt
        return abs(float(y[0]) - np.exp(0.5))

    ratio = err(0.02) / err(0.01)
    return 12.0 < ratio < 20.0, f"halving dt shrinks error by {ratio:.1f}x (expect about 16)"


def _check_gain_gate() -> tuple[bool, str]:
    gains_bad = GainSet.uniform(2, parameter_gain=1.5)
    try:
        gain_gate(gains_bad, coordination=True)
        return False, "g=1.5 with coordination was not rejected"
    except GainValidityError:
        pass
    try:
        GainSet.uniform(2, parameter_gain=-0.5)
        return False, "negative parameter gain was not rejected"
    except ValueError:
        pass
    strict = gain_gate(GainSet.uniform(2, parameter_gain=0.3), coordination=True)
    lasalle = gain_gate(GainSet.uniform(2, parameter_gain=1.0), coordination=True)
    ok = strict.case == "strict" and lasalle.case == "lasalle" and strict.determinant > 0
    return ok, f"g=0.3 -> {strict.case} (det {strict.determinant:.2f}), g=1.0 -> {lasalle.case}"


def _check_planar_closed_form(rng) -> tuple[bool, str]:
    sc = _planar_scenario()
    transform = sc.transform()
    worst = 0.0
    for _ in range(50):
        state = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-8, 8)])
        t = float(rng.uniform(0, 10))
        a = mpf_field(state, t, sc.path, transform, sc.target, sc.gains)
        b = planar_mpf_field(state, t, sc.path, sc.target, sc.gains)
        worst = max(
            worst,
            float(np.max(np.abs(a.velocity - b.velocity))),
            abs(a.parameter_rate - b.parameter_rate),
        )
    return worst < 1e-9, f"max |generic - closed form| {worst:.2e} over 50 states (tol 1e-9)"


def _check_backend_agreement() -> tuple[bool, str]:
    from . import backend as backend_mod

    sc = _planar_scenario(t_end=1.0)
    rec_nb = run(sc, backend="numba") if backend_mod.numba_available() else None
    rec_np = run(sc, backend="numpy")
    if rec_nb is None:
        return True, "numba unavailable; numpy fallback ran (skipped comparison)"
    diff = max(
        float(np.max(np.abs(rec_nb.x_inertial - rec_np.x_inertial))),
        float(np.max(np.abs(rec_nb.theta - rec_np.theta))),
    )
    return diff < 1e-9, f"max trajectory difference numba vs numpy {diff:.2e} (tol 1e-9)"


def _check_composite_descent() -> tuple[bool, str]:
    worst = -np.inf
    for g in (0.3, 1.0):
        record = run(_planar_scenario(g=g, t_end=2.0))
        worst = max(worst, float(np.max(np.diff(record.composite))))
    return worst <= 1e-8, f"max composite Lyapunov rise {worst:.2e} across g in (0.3, 1.0) (tol 1e-8)"


def run_property_checks(rng_seed: int = 0) -> list[CheckResult]:
    """Run every property check; returns one result per check."""
    rng = np.random.default_rng(rng_seed)
    checks = [
        ("wedge orthogonality", lambda: _check_wedge_orthogonality(rng)),
        ("wedge matches cross product in R^3", lambda: _check_cross_match(rng)),
        ("wedge closed form", lambda: _check_wedge_closed_form(rng)),
        ("field never vanishes", lambda: _check_nonvanishing(rng)),
        ("lyapunov descent identity", _check_lyapunov_descent),
        ("frame transform self-tests", _check_transform_self_tests),
        ("rk4 step order", _check_rk4_order),
        ("gain gate", _check_gain_gate),
        ("planar closed form", lambda: _check_planar_closed_form(rng)),
        ("backend agreement", _check_backend_agreement),
        ("composite descent", _check_composite_descent),
    ]
    results = []
    for name, fn in checks:
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, passed, detail))
    return results


def format_check_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}" for r in results
    ]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
