"""Small dense linear-algebra helpers: generalized cross products and difference oracles.

The generalized cross product takes n vectors in R^(n+1) and returns a vector
orthogonal to all of them; it reduces to the classical cross product for n = 2.
Determinants of the cofactor minors are expanded explicitly up to size 4 so the
n = 2 case agrees bit-for-bit with the textbook formula; larger minors fall back
to LU factorization.
"""
from __future__ import annotations

from typing import Callable

import numpy as np


def _det(m: np.ndarray) -> np.ndarray:
    """Determinant of a (possibly batched) square matrix (..., k, k)."""
    k = m.shape[-1]
    if k == 1:
        return m[..., 0, 0]
    if k == 2:
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    if k == 3:
        a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 0, 2]
        d, e, f = m[..., 1, 0], m[..., 1, 1], m[..., 1, 2]
        g, h, i = m[..., 2, 0], m[..., 2, 1], m[..., 2, 2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if k == 4:
        out = np.zeros(m.shape[:-2], dtype=m.dtype)
        sign = 1.0
        for j in range(4):
            cols = [c for c in range(4) if c != j]
            minor = m[..., 1:, :][..., :, cols]
            out = out + sign * m[..., 0, j] * _det(minor)
            sign = -sign
        return out
    return np.linalg.det(m)


def generalized_cross(vectors) -> np.ndarray:
    """Cross product of n vectors in R^(n+1), orthogonal to every input.

    Parameters
    ----------
    vectors : array_like, shape (n, n+1)
        The input vectors as rows.

    Returns
    -------
    ndarray, shape (n+1,)
        Component k (1-based) is (-1)^(k+1) times the determinant of the row
        matrix with column k removed.  The result is the zero vector exactly
        when the inputs are linearly dependent.
    """
    m = np.asarray(vectors, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D stack of vectors, got ndim={m.ndim}")
    n, cols = m.shape
    if n < 1 or cols != n + 1:
        raise ValueError(f"need n vectors of length n+1, got {n} of length {cols}")
    return generalized_cross_many(m[np.newaxis])[0]


def generalized_cross_many(stacks: np.ndarray) -> np.ndarray:
    """Vectorized :func:`generalized_cross` over a batch of shape (..., n, n+1)."""
    m = np.asarray(stacks, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] + 1:
        raise ValueError(f"expected shape (..., n, n+1), got {m.shape}")
    n = m.shape[-2]
    out = np.empty(m.shape[:-2] + (n + 1,))
    for k in range(n + 1):
        cols = [c for c in range(n + 1) if c != k]
        sign = 1.0 if k % 2 == 0 else -1.0
        out[..., k] = sign * _det(m[..., :, cols])
    if not np.all(np.isfinite(out)):
        raise ValueError("generalized cross product produced non-finite entries")
    return out


def finite_diff_gradient(f: Callable[[np.ndarray], float], x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function, used as a test oracle."""
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return grad


def central_difference(f: Callable[[float], np.ndarray], t: float, h: float = 1e-5) -> np.ndarray:
    """Central difference of a vector-valued function of a scalar argument."""
    if h <= 0:
        raise ValueError("step h must be positive")
    return (np.asarray(f(t + h), dtype=float) - np.asarray(f(t - h), dtype=float)) / (2.0 * h)


def skew2(omega: float) -> np.ndarray:
    """Planar frame-rotation matrix [[0, w], [-w, 0]].

    Maps a path-frame position to its apparent velocity induced by the frame
    spinning at rate ``omega``.  Note the sign: this is the negative of the
    conventional so(2) generator.
    """
    return np.array([[0.0, float(omega)], [-float(omega), 0.0]])


def skew3(rates) -> np.ndarray:
    """Standard so(3) hat map of a body rate vector (p, q, r)."""
    p, q, r = (float(v) for v in np.asarray(rates, dtype=float))
    return np.array([[0.0, -r, q], [r, 0.0, -p], [-q, p, 0.0]])
