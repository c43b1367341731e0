"""The non-singular guiding vector field on the extended state (x, theta).

The field steers an agent onto a desired path expressed in a possibly moving
frame.  On the stretched state space the error-descent direction is
-(grad V) and the propagation direction is the generalized cross product of
the surface gradients; their weighted sum

    w = -(convergence) grad V + (traversal) (orientation) (-1)^n (f', 1)

never vanishes because the two parts are orthogonal and the wedge part has a
unit last entry.  `mpf_field` pulls w back through a frame transform,
compensating the frame's own motion so path convergence is unaffected.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SingularJacobianError
from .frames import FrameTransform, UnicycleTarget, rot2
from .linalg import skew2
from .paths import LevelSetErrors, ParametricPath, level_set_errors, wedge_closed_form


@dataclass(frozen=True, eq=False)
class GainSet:
    """Diagonal gains of the guidance field.

    Attributes
    ----------
    error_weights : ndarray, shape (n,)
        Positive weights k_i of the quadratic path-error function.
    convergence : ndarray, shape (n+1,)
        Positive diagonal of the gain on the error-descent direction.  The last
        entry acts on the path-parameter channel; coordination restricts it to
        (0, 1] (see `coop.gain_gate`).
    traversal : ndarray, shape (n+1,)
        Positive diagonal of the gain on the propagation direction.
    consensus_gain : float
        Non-negative weight of the parameter-consensus term (0 disables it).
    orientation : int
        +1 or -1; flips the direction of travel along the path.
    """

    error_weights: np.ndarray
    convergence: np.ndarray
    traversal: np.ndarray
    consensus_gain: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        ew = np.asarray(self.error_weights, dtype=float)
        cv = np.asarray(self.convergence, dtype=float)
        tr = np.asarray(self.traversal, dtype=float)
        if ew.ndim != 1 or ew.size < 1:
            raise ValueError("error_weights must be a non-empty vector")
        if cv.shape != (ew.size + 1,) or tr.shape != (ew.size + 1,):
            raise ValueError(
                f"convergence and traversal must have shape ({ew.size + 1},), "
                f"got {cv.shape} and {tr.shape}"
            )
        for name, arr in (("error_weights", ew), ("convergence", cv), ("traversal", tr)):
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValueError(f"{name} entries must be positive and finite")
        if self.orientation not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        if not np.isfinite(self.consensus_gain) or self.consensus_gain < 0:
            raise ValueError("consensus_gain must be >= 0")
        object.__setattr__(self, "error_weights", ew)
        object.__setattr__(self, "convergence", cv)
        object.__setattr__(self, "traversal", tr)
        object.__setattr__(self, "consensus_gain", float(self.consensus_gain))

    @property
    def dim(self) -> int:
        return self.error_weights.size

    @property
    def parameter_gain(self) -> float:
        """Convergence gain on the path-parameter channel (the coordination-limited one)."""
        return float(self.convergence[-1])

    @classmethod
    def uniform(
        cls,
        dim: int,
        error_weight: float = 1.0,
        convergence: float = 1.0,
        traversal: float = 1.0,
        consensus_gain: float = 0.0,
        orientation: int = 1,
        parameter_gain: float | None = None,
    ) -> "GainSet":
        """Scalar gains replicated across channels; `parameter_gain` overrides the last convergence entry."""
        conv = np.full(dim + 1, float(convergence))
        if parameter_gain is not None:
            conv[-1] = float(parameter_gain)
        return cls(
            np.full(dim, float(error_weight)),
            conv,
            np.full(dim + 1, float(traversal)),
            consensus_gain,
            orientation,
        )


def lyapunov_value(phi, weights) -> float:
    """Quadratic path-error function V = sum_i w_i phi_i^2 / 2."""
    phi = np.asarray(phi, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return float(0.5 * np.sum(weights * phi * phi))


def lyapunov_gradient(errors: LevelSetErrors, weights) -> np.ndarray:
    """Extended-space gradient of V at the evaluated errors, shape (n+1,)."""
    weights = np.asarray(weights, dtype=float)
    return (weights * errors.phi) @ errors.gradients


def extended_field(path: ParametricPath, x_path, theta: float, gains: GainSet) -> np.ndarray:
    """The guiding field w on the path-frame extended state, shape (n+1,).

    Never the zero vector: the descent part is orthogonal to the propagation
    part, whose last component is +-(traversal gain).
    """
    errors = level_set_errors(path, x_path, theta)
    grad = lyapunov_gradient(errors, gains.error_weights)
    wedge = gains.orientation * wedge_closed_form(path, theta)
    return -gains.convergence * grad + gains.traversal * wedge


def extended_field_many(path: ParametricPath, x_path: np.ndarray, thetas: np.ndarray, gains: GainSet) -> np.ndarray:
    """Vectorized `extended_field` over leading axes of x_path (..., n) and thetas (...)."""
    x = np.asarray(x_path, dtype=float)
    th = np.asarray(thetas, dtype=float)
    f = path.sample(th)
    fp = path.sample_derivative(th)
    phi = x - f
    gv_sp = gains.error_weights * phi
    gv_th = -np.sum(gv_sp * fp, axis=-1, keepdims=True)
    sign = gains.orientation * (-1.0 if path.dim % 2 else 1.0)
    w_sp = -gains.convergence[:-1] * gv_sp + gains.traversal[:-1] * (sign * fp)
    w_th = -gains.convergence[-1] * gv_th + gains.traversal[-1] * sign
    return np.concatenate([w_sp, w_th], axis=-1)


@dataclass(frozen=True)
class FieldOutput:
    """Inertial-frame field value with recomputed diagnostics."""

    velocity: np.ndarray  # (n,) commanded inertial velocity
    parameter_rate: float  # d theta / dt
    lyapunov: float  # V at the evaluated state
    gradient_norm: float  # |grad V| on the extended state
    error_norm: float  # |phi|

    def extended(self) -> np.ndarray:
        """Stacked (velocity, parameter_rate), shape (n+1,)."""
        return np.append(self.velocity, self.parameter_rate)


def _diagnostics(errors: LevelSetErrors, grad: np.ndarray, weights) -> tuple[float, float, float]:
    v = lyapunov_value(errors.phi, weights)
    return v, float(np.linalg.norm(grad)), float(np.linalg.norm(errors.phi))


def mpf_field(
    state,
    t: float,
    path: ParametricPath,
    transform: FrameTransform,
    target,
    gains: GainSet,
) -> FieldOutput:
    """Moving-path-following field at extended state (x_I, theta) and time t.

    Pulls the path-frame field back to inertial coordinates through the frame
    transform: velocity = J^-1 (w_spatial - drift), parameter_rate = w_theta.
    Raises SingularJacobianError if the transform Jacobian is not invertible.
    """
    state = np.asarray(state, dtype=float)
    n = path.dim
    if state.shape != (n + 1,):
        raise ValueError(f"extended state must have shape ({n + 1},), got {state.shape}")
    x_inertial, theta = state[:n], state[n]
    x_path = transform.apply(x_inertial, target)
    errors = level_set_errors(path, x_path, theta)
    grad = lyapunov_gradient(errors, gains.error_weights)
    wedge = gains.orientation * wedge_closed_form(path, theta)
    w = -gains.convergence * grad + gains.traversal * wedge

    jac = transform.jacobian(x_inertial, target)
    det = np.linalg.det(jac)
    if not np.isfinite(det) or abs(det) < 1e-12:
        raise SingularJacobianError(f"frame Jacobian determinant {det:.3e} at t={t}")
    velocity = np.linalg.solve(jac, w[:n] - transform.drift(x_inertial, target, t))
    v, gn, en = _diagnostics(errors, grad, gains.error_weights)
    return FieldOutput(velocity, float(w[n]), v, gn, en)


def planar_mpf_field(
    state,
    t: float,
    path: ParametricPath,
    target: UnicycleTarget,
    gains: GainSet,
) -> FieldOutput:
    """Closed-form planar specialization of `mpf_field` for a unicycle target.

    Uses the rotation structure explicitly instead of solving the Jacobian
    system; agrees with the generic pullback to rounding error.
    """
    if path.dim != 2:
        raise ValueError("planar field requires a 2-D path")
    state = np.asarray(state, dtype=float)
    if state.shape != (3,):
        raise ValueError(f"extended state must have shape (3,), got {state.shape}")
    rot = rot2(target.heading)
    x_path = rot.T @ (state[:2] - target.position)
    errors = level_set_errors(path, x_path, state[2])
    grad = lyapunov_gradient(errors, gains.error_weights)
    wedge = gains.orientation * wedge_closed_form(path, state[2])
    w = -gains.convergence * grad + gains.traversal * wedge

    rates = target.kinematics(t)
    velocity = rates[:2] - rot @ (skew2(target.turn_rate(t)) @ x_path) + rot @ w[:2]
    v, gn, en = _diagnostics(errors, grad, gains.error_weights)
    return FieldOutput(velocity, float(w[2]), v, gn, en)


@dataclass(frozen=True)
class LyapunovRateReport:
    """Descent diagnostics of V along a recorded trajectory.

    `rates` holds centered finite differences of V at interior samples;
    `residuals` (identity mode only) holds |dV/dt + g |grad V|^2|, which should
    vanish when both gain diagonals are uniform.
    """

    mode: str  # 'identity' | 'descent'
    times: np.ndarray  # (S-2,) interior sample times
    values: np.ndarray  # (S,) V at every sample
    rates: np.ndarray  # (S-2,)
    gradient_sq: np.ndarray  # (S-2,) |grad V|^2 at interior samples
    residuals: np.ndarray | None
    max_rate: float
    max_residual: float | None


def lyapunov_rate_report(
    times: Sequence[float],
    states_path_frame: np.ndarray,
    path: ParametricPath,
    gains: GainSet,
) -> LyapunovRateReport:
    """Differentiate V along path-frame samples and compare against the field's promise.

    With uniform convergence and traversal diagonals the exact identity
    dV/dt = -g |grad V|^2 holds; otherwise only the sign of dV/dt is checked
    (report mode 'descent').
    """
    times = np.asarray(times, dtype=float)
    states = np.asarray(states_path_frame, dtype=float)
    if times.ndim != 1 or times.size < 3:
        raise ValueError("need at least three samples")
    if states.shape != (times.size, path.dim + 1):
        raise ValueError(f"states must have shape ({times.size}, {path.dim + 1})")
    n = path.dim
    f = path.sample(states[:, n])
    fp = path.sample_derivative(states[:, n])
    phi = states[:, :n] - f
    weighted = gains.error_weights * phi
    values = 0.5 * np.sum(weighted * phi, axis=1)
    grad_sq = np.sum(weighted * weighted, axis=1) + np.sum(weighted * fp, axis=1) ** 2

    rates = (values[2:] - values[:-2]) / (times[2:] - times[:-2])
    interior_grad_sq = grad_sq[1:-1]
    uniform = np.ptp(gains.convergence) == 0.0 and np.ptp(gains.traversal) == 0.0
    if uniform:
        residuals = np.abs(rates + gains.parameter_gain * interior_grad_sq)
        max_residual = float(np.max(residuals))
        mode = "identity"
    else:
        residuals, max_residual, mode = None, None, "descent"
    return LyapunovRateReport(
        mode=mode,
        times=times[1:-1],
        values=values,
        rates=rates,
        gradient_sq=interior_grad_sq,
        residuals=residuals,
        max_rate=float(np.max(rates)),
        max_residual=max_residual,
    )
