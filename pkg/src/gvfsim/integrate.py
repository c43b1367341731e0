"""Classical fixed-step fourth-order Runge-Kutta stepping.

Shared by the target kinematics and by the reference (object-level) scenario
dynamics; the array kernels inline the same scheme.
"""
from __future__ import annotations

from typing import Callable

import numpy as np


def rk4_step(y: np.ndarray, t: float, dt: float, f: Callable) -> np.ndarray:
    """One RK4 step of y' = f(t, y); fourth-order accurate in dt.

    dt may be negative (backward integration) but not zero.
    """
    if not np.isfinite(dt) or dt == 0.0:
        raise ValueError("dt must be a nonzero finite number")
    y = np.asarray(y, dtype=float)
    k1 = np.asarray(f(t, y), dtype=float)
    k2 = np.asarray(f(t + 0.5 * dt, y + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(f(t + 0.5 * dt, y + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(f(t + dt, y + dt * k3), dtype=float)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
