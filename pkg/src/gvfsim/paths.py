"""Parametric desired paths, their level-set errors, and extended-space gradients.

A path is a smooth map theta -> f(theta) in R^n.  A point of the extended state
space R^(n+1) is written xi = (x, theta); the path is the common zero set of the
surface functions phi_i = x_i - f_i(theta), and each phi_i has the extended
gradient (e_i, -f_i'(theta)).  Stacking the n gradients and taking their
generalized cross product yields the propagation direction
(-1)^n (f'(theta), 1), whose last entry never vanishes: the stretched path has
no singular points.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def _normalize_terms(axes_terms) -> np.ndarray:
    """Pack per-axis trig terms into a zero-padded (n, T, 3) array of (a, b, k)."""
    rows = []
    for axis, terms in enumerate(axes_terms):
        packed = []
        for term in terms:
            if isinstance(term, dict):
                a = float(term.get("a", 0.0))
                b = float(term.get("b", 0.0))
                k = float(term.get("k", 1.0))
            else:
                a, b, k = (float(v) for v in term)
            packed.append((a, b, k))
        if not packed:
            raise ValueError(f"axis {axis} has no terms")
        rows.append(packed)
    if not rows:
        raise ValueError("path needs at least one axis")
    width = max(len(r) for r in rows)
    out = np.zeros((len(rows), width, 3))
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out


def _trig_eval(terms: np.ndarray, thetas) -> np.ndarray:
    th = np.asarray(thetas, dtype=float)[..., np.newaxis, np.newaxis]
    a, b, k = terms[..., 0], terms[..., 1], terms[..., 2]
    return (a * np.cos(k * th) + b * np.sin(k * th)).sum(axis=-1)


def _trig_deriv(terms: np.ndarray, thetas) -> np.ndarray:
    th = np.asarray(thetas, dtype=float)[..., np.newaxis, np.newaxis]
    a, b, k = terms[..., 0], terms[..., 1], terms[..., 2]
    return (k * (b * np.cos(k * th) - a * np.sin(k * th))).sum(axis=-1)


def _trig_second(terms: np.ndarray, thetas) -> np.ndarray:
    th = np.asarray(thetas, dtype=float)[..., np.newaxis, np.newaxis]
    a, b, k = terms[..., 0], terms[..., 1], terms[..., 2]
    return (-k * k * (a * np.cos(k * th) + b * np.sin(k * th))).sum(axis=-1)


class ParametricPath:
    """A desired path f: R -> R^n with analytic first derivative.

    Parameters
    ----------
    dim : int
        Ambient spatial dimension n.
    point, derivative : callable
        Maps from scalar theta to arrays of shape (n,).  Paths built from trig
        terms also broadcast over array arguments.
    second_derivative : callable, optional
        Falls back to a central difference of `derivative` when omitted.
    trig_terms : ndarray, optional
        (n, T, 3) coefficients (a, b, k) meaning a*cos(k theta) + b*sin(k theta);
        required for scenarios executed by the compiled runner.
    label : str, optional
        Short name used when serializing scenarios.
    """

    def __init__(
        self,
        dim: int,
        point: Callable,
        derivative: Callable,
        second_derivative: Callable | None = None,
        trig_terms: np.ndarray | None = None,
        label: str | None = None,
        validate: bool = True,
    ):
        if dim < 1:
            raise ValueError("path dimension must be >= 1")
        self.dim = int(dim)
        self._point = point
        self._derivative = derivative
        self._second = second_derivative
        self.trig_terms = None if trig_terms is None else np.asarray(trig_terms, dtype=float)
        self.label = label
        if validate:
            self._check_consistency()

    def _check_consistency(self) -> None:
        # spot-check the supplied derivative against a finite difference
        for theta in np.linspace(-2.0 * np.pi, 2.0 * np.pi, 9):
            p = np.asarray(self.point(theta), dtype=float)
            d = np.asarray(self.derivative(theta), dtype=float)
            if p.shape != (self.dim,) or d.shape != (self.dim,):
                raise ValueError(
                    f"path callables must return shape ({self.dim},), got {p.shape} and {d.shape}"
                )
            if not (np.all(np.isfinite(p)) and np.all(np.isfinite(d))):
                raise ValueError(f"path evaluation not finite at theta={theta}")
            h = 1e-5
            approx = (np.asarray(self.point(theta + h)) - np.asarray(self.point(theta - h))) / (2 * h)
            err = np.max(np.abs(d - approx) / (1.0 + np.abs(d)))
            if err > 1e-6:
                raise ValueError(
                    f"derivative disagrees with finite difference at theta={theta:.3f} "
                    f"(relative error {err:.2e})"
                )

    def point(self, theta) -> np.ndarray:
        """Path point f(theta)."""
        return np.asarray(self._point(theta), dtype=float)

    def derivative(self, theta) -> np.ndarray:
        """First derivative f'(theta)."""
        return np.asarray(self._derivative(theta), dtype=float)

    def second_derivative(self, theta) -> np.ndarray:
        if self._second is not None:
            return np.asarray(self._second(theta), dtype=float)
        h = 1e-5
        return (self.derivative(theta + h) - self.derivative(theta - h)) / (2 * h)

    def sample(self, thetas) -> np.ndarray:
        """Evaluate f over an array of parameters; returns shape thetas.shape + (n,)."""
        thetas = np.asarray(thetas, dtype=float)
        if self.trig_terms is not None:
            return _trig_eval(self.trig_terms, thetas)
        flat = [self.point(t) for t in thetas.ravel()]
        return np.asarray(flat).reshape(thetas.shape + (self.dim,))

    def sample_derivative(self, thetas) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        if self.trig_terms is not None:
            return _trig_deriv(self.trig_terms, thetas)
        flat = [self.derivative(t) for t in thetas.ravel()]
        return np.asarray(flat).reshape(thetas.shape + (self.dim,))


def trig_path(axes_terms: Sequence, label: str | None = None) -> ParametricPath:
    """Build a path from per-axis lists of (a, b, k) trig terms.

    Each term contributes a*cos(k*theta) + b*sin(k*theta) to its axis, so the
    derivatives used by the field and by the compiled runner are exact.
    """
    terms = _normalize_terms(axes_terms)
    dim = terms.shape[0]
    return ParametricPath(
        dim,
        point=lambda th: _trig_eval(terms, th),
        derivative=lambda th: _trig_deriv(terms, th),
        second_derivative=lambda th: _trig_second(terms, th),
        trig_terms=terms,
        label=label,
    )


def builtin_ellipse() -> ParametricPath:
    """Planar ellipse x = 2 cos(theta), y = sin(theta)."""
    return trig_path([[(2.0, 0.0, 1.0)], [(0.0, 1.0, 1.0)]], label="ellipse")


def builtin_lissajous() -> ParametricPath:
    """Spatial Lissajous curve (2 cos(theta), sin(theta), cos(theta/2))."""
    return trig_path(
        [[(2.0, 0.0, 1.0)], [(0.0, 1.0, 1.0)], [(1.0, 0.0, 0.5)]], label="lissajous"
    )


def numeric_path(point: Callable, dim: int, h: float = 1e-6) -> ParametricPath:
    """Adapt a point-only callable using numeric derivatives.

    Prefer analytic derivatives; this adapter trades accuracy for convenience
    and says so loudly.
    """
    warnings.warn(
        "numeric_path differentiates by finite differences; derivative accuracy "
        "is limited and the compiled runner cannot execute such a path",
        stacklevel=2,
    )

    def deriv(theta):
        return (np.asarray(point(theta + h), dtype=float) - np.asarray(point(theta - h), dtype=float)) / (2 * h)

    return ParametricPath(dim, point, deriv, validate=False)


def derivative_bounds(path: ParametricPath, window=(-4 * np.pi, 4 * np.pi), samples: int = 2048):
    """Max |f'| and |f''| over a compact parameter window (smoothness spot check)."""
    thetas = np.linspace(window[0], window[1], samples)
    d1 = np.asarray([path.derivative(t) for t in thetas])
    d2 = np.asarray([path.second_derivative(t) for t in thetas])
    if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
        raise ValueError("path derivatives are not finite on the sampled window")
    return float(np.max(np.abs(d1))), float(np.max(np.abs(d2)))


@dataclass(frozen=True)
class LevelSetErrors:
    """Per-axis path errors and their extended-space gradients.

    Attributes
    ----------
    phi : ndarray, shape (n,)
        phi_i = x_i - f_i(theta) in the frame the path lives in.
    gradients : ndarray, shape (n, n+1)
        Row i is the gradient of phi_i with respect to (x, theta).
    """

    phi: np.ndarray
    gradients: np.ndarray


def level_set_errors(path: ParametricPath, x_path, theta: float) -> LevelSetErrors:
    """Evaluate the surface errors phi and their extended gradients at (x, theta)."""
    x = np.asarray(x_path, dtype=float)
    if x.shape != (path.dim,):
        raise ValueError(f"position must have shape ({path.dim},), got {x.shape}")
    f = path.point(theta)
    fp = path.derivative(theta)
    grads = np.hstack([np.eye(path.dim), -fp[:, np.newaxis]])
    return LevelSetErrors(phi=x - f, gradients=grads)


def wedge_closed_form(path: ParametricPath, theta: float) -> np.ndarray:
    """Generalized cross product of the n extended gradients, in closed form.

    Equals (-1)^n (f'(theta), 1); its last entry is +-1, so it never vanishes.
    """
    sign = -1.0 if path.dim % 2 else 1.0
    return sign * np.append(path.derivative(theta), 1.0)


def extend(x, theta: float) -> np.ndarray:
    """Stack a spatial position and a path parameter into an extended state."""
    return np.append(np.asarray(x, dtype=float), float(theta))


def project(xi) -> np.ndarray:
    """Spatial part of an extended state (drops the trailing parameter)."""
    xi = np.asarray(xi, dtype=float)
    return xi[:-1].copy()
