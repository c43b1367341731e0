"""Backend benchmark: compiled kernels vs the vectorized-numpy fallback.

Both backends integrate the identical lowered scenario, so the comparison
is step-for-step fair and the final states can be diffed directly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backend as backend_mod
from .sim import Scenario, run

__all__ = ["BackendTiming", "BenchReport", "benchmark_scenario", "format_bench_report"]


@dataclass(frozen=True)
class BackendTiming:
    backend: str
    wall_s: float
    steps: int

    @property
    def steps_per_second(self) -> float:
        return self.steps / self.wall_s if self.wall_s > 0 else float("inf")


@dataclass(frozen=True)
class BenchReport:
    scenario: str
    timings: tuple[BackendTiming, ...]
    max_state_diff: float  # max |final state difference| across backends

    @property
    def speedup(self) -> float | None:
        """numpy wall / numba wall, when both ran."""
        walls = {t.backend: t.wall_s for t in self.timings}
        if "numba" in walls and "numpy" in walls and walls["numba"] > 0:
            return walls["numpy"] / walls["numba"]
        return None


def benchmark_scenario(scenario: Scenario, repeats: int = 1) -> BenchReport:
    """Time a run under every available backend and diff the final states."""
    backends = ["numpy"]
    if backend_mod.numba_available():
        backends.insert(0, "numba")
        run(scenario, backend="numba")  # compile outside the timed region
    steps = round((scenario.t_end - scenario.t_start) / scenario.dt)

    timings = []
    finals = {}
    for name in backends:
        best = np.inf
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            record = run(scenario, backend=name)
            best = min(best, time.perf_counter() - t0)
        finals[name] = np.concatenate([record.x_inertial[-1].ravel(), record.theta[-1]])
        timings.append(BackendTiming(name, best, steps))

    diff = 0.0
    if len(finals) == 2:
        diff = float(np.max(np.abs(finals["numba"] - finals["numpy"])))
    return BenchReport(scenario.name, tuple(timings), diff)


def format_bench_report(report: BenchReport) -> str:
    lines = [f"scenario {report.scenario}:"]
    for t in report.timings:
        lines.append(
            f"  {t.backend:<6} {t.wall_s * 1e3:9.1f} ms   {t.steps_per_second:12.0f} steps/s"
        )
    if report.speedup is not None:
        lines.append(f"  speedup {report.speedup:.1f}x, final-state max diff {report.max_state_diff:.2e}")
    return "\n".join(lines)
