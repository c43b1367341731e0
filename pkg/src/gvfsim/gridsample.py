"""Field portraits: evaluate the guidance field over a spatial grid.

Planar scenarios sample (x, y) directly; spatial scenarios fix the third axis
to a constant and sample the same planar slice.  Each row carries the inertial
field value and its norm; states where the frame Jacobian is singular are kept
but flagged instead of aborting the sweep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularJacobianError
from .field import mpf_field
from .frames import step_aircraft, step_unicycle


@dataclass(frozen=True)
class FieldSampleGrid:
    """Rectangular sampling grid over two spatial axes at fixed parameter slices."""

    x_bounds: tuple[float, float]
    y_bounds: tuple[float, float]
    nx: int = 41
    ny: int = 41
    thetas: tuple[float, ...] = (0.0,)
    t: float = 0.0  # evaluation instant; moving targets are advanced to it
    fixed_axis_value: float | None = None  # third-axis value for 3-D scenarios

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("need at least two samples per axis")
        if not (self.x_bounds[1] > self.x_bounds[0] and self.y_bounds[1] > self.y_bounds[0]):
            raise ValueError("grid bounds must be non-degenerate")
        if len(self.thetas) < 1:
            raise ValueError("need at least one parameter slice")

    def axis_points(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.x_bounds[0], self.x_bounds[1], self.nx),
            np.linspace(self.y_bounds[0], self.y_bounds[1], self.ny),
        )


@dataclass(frozen=True)
class FieldSampleResult:
    """Rows of field samples plus the minimum field norm over regular rows."""

    columns: tuple[str, ...]
    rows: np.ndarray
    min_norm: float

    @property
    def num_singular(self) -> int:
        return int(self.rows[:, -1].sum())


def _advance_target(scenario, t: float):
    """Target state at time t, co-integrated from the scenario's start."""
    target = scenario.target
    if scenario.transform_kind == "static" or t == scenario.t_start:
        return target
    stepper = step_unicycle if scenario.transform_kind == "se2_unicycle" else step_aircraft
    dt = scenario.dt
    steps, remainder = divmod(t - scenario.t_start, dt)
    clock = scenario.t_start
    for _ in range(int(round(steps))):
        target = stepper(target, clock, dt)
        clock += dt
    if remainder > 1e-12:
        target = stepper(target, clock, float(remainder))
    return target


def sample_field(scenario, grid: FieldSampleGrid) -> FieldSampleResult:
    """Evaluate the scenario's guidance field on a grid of inertial positions.

    Returns one row per (theta slice, grid point):
    (x, y, theta, velocity components, parameter rate, field norm, singular flag).
    The reported minimum norm skips flagged rows.
    """
    n = scenario.spatial_dim
    if n == 2 and grid.fixed_axis_value is not None:
        raise ValueError("fixed_axis_value only applies to 3-D scenarios")
    if n == 3 and grid.fixed_axis_value is None:
        raise ValueError("3-D scenarios need fixed_axis_value to pick the sampled slice")
    if n not in (2, 3):
        raise ValueError("field portraits support 2-D and 3-D scenarios")

    target = _advance_target(scenario, grid.t)
    transform = scenario.transform()
    xs, ys = grid.axis_points()

    vel_cols = ("u_x", "u_y") if n == 2 else ("u_x", "u_y", "u_z")
    columns = ("x", "y", "theta") + vel_cols + ("theta_dot", "field_norm", "singular")
    rows = np.empty((len(grid.thetas) * grid.nx * grid.ny, len(columns)))

    idx = 0
    min_norm = np.inf
    for theta in grid.thetas:
        for x in xs:
            for y in ys:
                if n == 2:
                    state = np.array([x, y, theta])
                else:
                    state = np.array([x, y, grid.fixed_axis_value, theta])
                try:
                    out = mpf_field(state, grid.t, scenario.path, transform, target, scenario.gains)
                    ext = out.extended()
                    norm = float(np.linalg.norm(ext))
                    rows[idx] = (x, y, theta, *ext, norm, 0.0)
                    min_norm = min(min_norm, norm)
                except SingularJacobianError:
                    rows[idx] = (x, y, theta, *np.full(n + 1, np.nan), np.nan, 1.0)
                idx += 1
    return FieldSampleResult(columns=columns, rows=rows, min_norm=float(min_norm))
