"""Time-varying frame transformations and the moving-target kinematics behind them.

A transform maps inertial positions into the frame the desired path lives in,
x_P = F(x_I, target).  Guidance in a moving frame needs three pieces of it: the
value, the spatial Jacobian, and the drift dF/dt|_{x fixed} contributed by the
frame's own motion.  Two concrete target models are provided: a planar unicycle
and a rigid-body target with x-y-z Euler attitude.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import EulerSingularityError, SingularJacobianError
from .integrate import rk4_step
from .linalg import skew2, skew3

EULER_PITCH_MARGIN = 0.1  # rad of clearance kept from the +-pi/2 attitude singularity


@dataclass(frozen=True)
class ProfileTerm:
    """One additive term of a scalar time profile."""

    kind: str  # 'const' | 'sin' | 'cos'
    amplitude: float
    frequency: float = 0.0  # rad/s
    phase: float = 0.0  # rad

    def __post_init__(self):
        if self.kind not in ("const", "sin", "cos"):
            raise ValueError(f"unknown profile term kind {self.kind!r}")


@dataclass(frozen=True)
class TimeProfile:
    """Sum of constant and sinusoidal terms with an analytic derivative."""

    terms: tuple[ProfileTerm, ...]

    def __call__(self, t):
        total = 0.0
        for term in self.terms:
            if term.kind == "const":
                total = total + term.amplitude * np.ones_like(np.asarray(t, dtype=float))
            elif term.kind == "sin":
                total = total + term.amplitude * np.sin(term.frequency * np.asarray(t, dtype=float) + term.phase)
            else:
                total = total + term.amplitude * np.cos(term.frequency * np.asarray(t, dtype=float) + term.phase)
        return total if np.ndim(t) else float(total)

    def derivative(self) -> "TimeProfile":
        out = []
        for term in self.terms:
            if term.kind == "const":
                continue
            if term.kind == "sin":
                out.append(ProfileTerm("cos", term.amplitude * term.frequency, term.frequency, term.phase))
            else:
                out.append(ProfileTerm("sin", -term.amplitude * term.frequency, term.frequency, term.phase))
        if not out:
            out.append(ProfileTerm("const", 0.0))
        return TimeProfile(tuple(out))

    @staticmethod
    def constant(value: float) -> "TimeProfile":
        return TimeProfile((ProfileTerm("const", float(value)),))

    @staticmethod
    def sinusoid(amplitude: float, frequency: float, phase: float = 0.0, kind: str = "sin") -> "TimeProfile":
        return TimeProfile((ProfileTerm(kind, float(amplitude), float(frequency), float(phase)),))


def rot2(angle):
    """Rotation matrix frame -> inertial for a planar frame at heading `angle`."""
    c, s = np.cos(angle), np.sin(angle)
    out = np.empty(np.shape(angle) + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def euler_xyz_matrix(euler):
    """Rotation matrix frame -> inertial for roll/pitch/yaw applied in x-y-z order.

    Equals Rz(yaw) @ Ry(pitch) @ Rx(roll); broadcasts over leading axes.
    """
    e = np.asarray(euler, dtype=float)
    r, p, y = e[..., 0], e[..., 1], e[..., 2]
    cr, sr = np.cos(r), np.sin(r)
    cp, sp = np.cos(p), np.sin(p)
    cy, sy = np.cos(y), np.sin(y)
    out = np.empty(e.shape[:-1] + (3, 3))
    out[..., 0, 0] = cy * cp
    out[..., 0, 1] = cy * sp * sr - sy * cr
    out[..., 0, 2] = cy * sp * cr + sy * sr
    out[..., 1, 0] = sy * cp
    out[..., 1, 1] = sy * sp * sr + cy * cr
    out[..., 1, 2] = sy * sp * cr - cy * sr
    out[..., 2, 0] = -sp
    out[..., 2, 1] = cp * sr
    out[..., 2, 2] = cp * cr
    return out


@dataclass(frozen=True, eq=False)
class UnicycleTarget:
    """Planar non-holonomic target: heading-aligned speed plus a turn-rate profile."""

    position: np.ndarray  # (2,) m
    heading: float  # rad
    speed: TimeProfile  # m/s
    turn_rate: TimeProfile  # rad/s

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (2,) or not np.all(np.isfinite(pos)):
            raise ValueError("unicycle position must be a finite 2-vector")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "heading", float(self.heading))

    def state_vector(self) -> np.ndarray:
        return np.append(self.position, self.heading)

    def kinematics(self, t: float) -> np.ndarray:
        """State rates (xdot, ydot, heading rate) at time t."""
        v = self.speed(t)
        return np.array([v * np.cos(self.heading), v * np.sin(self.heading), self.turn_rate(t)])

    def with_state(self, state) -> "UnicycleTarget":
        state = np.asarray(state, dtype=float)
        return replace(self, position=state[:2], heading=float(state[2]))


@dataclass(frozen=True, eq=False)
class AircraftTarget:
    """Rigid-body target with body-frame velocity/rate profiles and x-y-z Euler attitude."""

    position: np.ndarray  # (3,) m
    euler: np.ndarray  # (3,) rad: roll, pitch, yaw
    body_velocity: tuple[TimeProfile, TimeProfile, TimeProfile]  # m/s, body axes
    body_rates: tuple[TimeProfile, TimeProfile, TimeProfile]  # rad/s, body axes

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        eul = np.asarray(self.euler, dtype=float)
        if pos.shape != (3,) or eul.shape != (3,):
            raise ValueError("aircraft position and euler must be 3-vectors")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(eul))):
            raise ValueError("aircraft state must be finite")
        if len(self.body_velocity) != 3 or len(self.body_rates) != 3:
            raise ValueError("need three body-velocity and three body-rate profiles")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "euler", eul)
        self._check_guard(eul[1])

    @staticmethod
    def _check_guard(pitch: float) -> None:
        if abs(pitch) >= np.pi / 2 - EULER_PITCH_MARGIN:
            raise EulerSingularityError(
                f"target pitch {pitch:.4f} rad is within {EULER_PITCH_MARGIN} rad of the "
                "Euler-angle singularity at +-pi/2"
            )

    def state_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.euler])

    def body_velocity_vector(self, t: float) -> np.ndarray:
        return np.array([p(t) for p in self.body_velocity])

    def body_rate_vector(self, t: float) -> np.ndarray:
        return np.array([p(t) for p in self.body_rates])

    def kinematics(self, t: float) -> np.ndarray:
        """State rates (position rates, Euler-angle rates) at time t."""
        roll, pitch = self.euler[0], self.euler[1]
        self._check_guard(pitch)
        vel = euler_xyz_matrix(self.euler) @ self.body_velocity_vector(t)
        p, q, r = self.body_rate_vector(t)
        cr, sr = np.cos(roll), np.sin(roll)
        tp, cp = np.tan(pitch), np.cos(pitch)
        euler_rates = np.array(
            [p + (r * cr + q * sr) * tp, q * cr - r * sr, (r * cr + q * sr) / cp]
        )
        return np.concatenate([vel, euler_rates])

    def with_state(self, state) -> "AircraftTarget":
        state = np.asarray(state, dtype=float)
        return replace(self, position=state[:3], euler=state[3:6])


def step_unicycle(target: UnicycleTarget, t: float, dt: float) -> UnicycleTarget:
    """Advance a unicycle target one RK4 step; profiles are read at stage times."""
    speed, turn = target.speed, target.turn_rate

    def rates(tt, s):
        v = speed(tt)
        return np.array([v * np.cos(s[2]), v * np.sin(s[2]), turn(tt)])

    return target.with_state(rk4_step(target.state_vector(), t, dt, rates))


def step_aircraft(target: AircraftTarget, t: float, dt: float) -> AircraftTarget:
    """Advance an aircraft target one RK4 step; raises if pitch enters the guard band."""

    def rates(tt, s):
        return replace(target, position=s[:3], euler=s[3:6]).kinematics(tt)

    return target.with_state(rk4_step(target.state_vector(), t, dt, rates))


class FrameTransform:
    """Interface of a time-varying frame map x_P = apply(x_I, target).

    Implementations must keep `jacobian` equal to the spatial derivative of
    `apply` and `drift` equal to the time derivative of apply at fixed x_I;
    `verify_transform` checks both numerically and is the acceptance gate for
    custom transforms.
    """

    dim: int

    def apply(self, x_inertial, target) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, x_inertial, target) -> np.ndarray:
        raise NotImplementedError

    def drift(self, x_inertial, target, t: float) -> np.ndarray:
        raise NotImplementedError

    def inverse_apply(self, x_path, target) -> np.ndarray:
        raise NotImplementedError


class StaticTransform(FrameTransform):
    """Identity map: the path lives directly in the inertial frame."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)

    def apply(self, x_inertial, target=None) -> np.ndarray:
        return np.array(x_inertial, dtype=float)

    def jacobian(self, x_inertial, target=None) -> np.ndarray:
        return np.eye(self.dim)

    def drift(self, x_inertial, target=None, t: float = 0.0) -> np.ndarray:
        return np.zeros(self.dim)

    def inverse_apply(self, x_path, target=None) -> np.ndarray:
        return np.array(x_path, dtype=float)


class PlanarTargetTransform(FrameTransform):
    """Frame attached to a unicycle target, axes rotating with its heading."""

    dim = 2

    def apply(self, x_inertial, target: UnicycleTarget) -> np.ndarray:
        rot = rot2(target.heading)
        return rot.T @ (np.asarray(x_inertial, dtype=float) - target.position)

    def jacobian(self, x_inertial, target: UnicycleTarget) -> np.ndarray:
        return rot2(target.heading).T

    def drift(self, x_inertial, target: UnicycleTarget, t: float) -> np.ndarray:
        rates = target.kinematics(t)
        x_p = self.apply(x_inertial, target)
        return skew2(target.turn_rate(t)) @ x_p - rot2(target.heading).T @ rates[:2]

    def inverse_apply(self, x_path, target: UnicycleTarget) -> np.ndarray:
        return target.position + rot2(target.heading) @ np.asarray(x_path, dtype=float)


class SpatialTargetTransform(FrameTransform):
    """Frame attached to a rigid-body target with x-y-z Euler attitude."""

    dim = 3

    def apply(self, x_inertial, target: AircraftTarget) -> np.ndarray:
        c = euler_xyz_matrix(target.euler)
        return c.T @ (np.asarray(x_inertial, dtype=float) - target.position)

    def jacobian(self, x_inertial, target: AircraftTarget) -> np.ndarray:
        return euler_xyz_matrix(target.euler).T

    def drift(self, x_inertial, target: AircraftTarget, t: float) -> np.ndarray:
        # dF/dt at fixed x: frame rotation sweeps the point, frame origin runs away
        x_p = self.apply(x_inertial, target)
        c = euler_xyz_matrix(target.euler)
        position_rate = c @ target.body_velocity_vector(t)
        return -skew3(target.body_rate_vector(t)) @ x_p - c.T @ position_rate

    def inverse_apply(self, x_path, target: AircraftTarget) -> np.ndarray:
        return target.position + euler_xyz_matrix(target.euler) @ np.asarray(x_path, dtype=float)


def verify_transform(
    transform: FrameTransform,
    target,
    advance: Callable,
    t: float = 0.0,
    rng_seed: int = 0,
) -> None:
    """Self-check a transform at the given target state; raises on failure.

    Checks the inverse round-trip on random points (1e-10) and the drift against
    a central difference of t -> apply(x, target(t)) taken by advancing the
    target with `advance` (1e-5).  All frame transforms, including custom ones,
    should pass through here once before use.
    """
    rng = np.random.default_rng(rng_seed)
    n = transform.dim
    for _ in range(4):
        x = rng.uniform(-3.0, 3.0, size=n)
        back = transform.inverse_apply(transform.apply(x, target), target)
        if np.max(np.abs(back - x)) > 1e-10:
            raise ValueError("transform inverse round-trip failed")
        jac = transform.jacobian(x, target)
        if abs(np.linalg.det(jac)) < 1e-12:
            raise SingularJacobianError("transform Jacobian is singular at the checked state")
        h = 1e-4
        plus = transform.apply(x, advance(target, t, h))
        minus = transform.apply(x, advance(target, t, -h))  # RK4 runs backwards fine
        fd = (plus - minus) / (2.0 * h)
        drift = transform.drift(x, target, t)
        if np.max(np.abs(fd - drift)) > 1e-5:
            raise ValueError(
                f"transform drift disagrees with finite difference by {np.max(np.abs(fd - drift)):.2e}"
            )


def se2_transform(target: UnicycleTarget) -> PlanarTargetTransform:
    """Planar moving-frame transform, self-checked at the given target state."""
    if not isinstance(target, UnicycleTarget):
        raise TypeError("se2_transform expects a UnicycleTarget")
    transform = PlanarTargetTransform()
    verify_transform(transform, target, step_unicycle)
    return transform


def se3_euler_transform(target: AircraftTarget) -> SpatialTargetTransform:
    """Spatial moving-frame transform, self-checked at the given target state."""
    if not isinstance(target, AircraftTarget):
        raise TypeError("se3_euler_transform expects an AircraftTarget")
    transform = SpatialTargetTransform()
    verify_transform(transform, target, step_aircraft)
    return transform
