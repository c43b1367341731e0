"""Pure-numpy twin of the compiled kernels, vectorized across agents.

Same argument tuple and return conventions as `_kernels_nb`; selected via the
GVFSIM_BACKEND environment flag or the `backend=` argument of `sim.run`.
"""
from __future__ import annotations

import numpy as np

_PITCH_LIMIT = np.pi / 2 - 0.1
_STATE_BOUND = 1e6


def _profile_value(prof_terms, prof_counts, ch, t):
    total = 0.0
    for j in range(prof_counts[ch]):
        code, amp, freq, phase = prof_terms[ch, j]
        if code == 0.0:
            total += amp
        elif code == 1.0:
            total += amp * np.sin(freq * t + phase)
        else:
            total += amp * np.cos(freq * t + phase)
    return total


def _rhs(t, y, n, num_agents, zdim, kind, path_terms, path_counts,
         prof_terms, prof_counts, err_w, conv, trav, kc, wsign,
         lap, theta_star, out):
    rot = np.eye(n)  # frame -> inertial
    omega_term = None  # callable x_P (N, n) -> rotational drift part
    vel_term = np.zeros(n)
    if kind == 1:
        v = _profile_value(prof_terms, prof_counts, 0, t)
        om = _profile_value(prof_terms, prof_counts, 1, t)
        ch, sh = np.cos(y[2]), np.sin(y[2])
        out[0] = v * ch
        out[1] = v * sh
        out[2] = om
        rot = np.array([[ch, -sh], [sh, ch]])
        vel_term = np.array([v, 0.0])
        omega_term = lambda xp: np.stack([om * xp[:, 1], -om * xp[:, 0]], axis=1)
    elif kind == 2:
        if abs(y[4]) >= _PITCH_LIMIT:
            return 2
        uvw = np.array([_profile_value(prof_terms, prof_counts, c, t) for c in range(3)])
        p, q, r = (_profile_value(prof_terms, prof_counts, c, t) for c in range(3, 6))
        cr, sr = np.cos(y[3]), np.sin(y[3])
        cp, sp = np.cos(y[4]), np.sin(y[4])
        cy, sy = np.cos(y[5]), np.sin(y[5])
        rot = np.array(
            [
                [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
                [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
                [-sp, cp * sr, cp * cr],
            ]
        )
        out[0:3] = rot @ uvw
        out[3] = p + (r * cr + q * sr) * (sp / cp)
        out[4] = q * cr - r * sr
        out[5] = (r * cr + q * sr) / cp
        vel_term = uvw
        omega_term = lambda xp: -np.stack(
            [-r * xp[:, 1] + q * xp[:, 2], r * xp[:, 0] - p * xp[:, 2], -q * xp[:, 0] + p * xp[:, 1]],
            axis=1,
        )

    states = y[zdim:].reshape(num_agents, n + 1)
    thetas = states[:, n]

    th = thetas[:, np.newaxis, np.newaxis]
    a, b, k = path_terms[..., 0], path_terms[..., 1], path_terms[..., 2]
    ck, sk = np.cos(k * th), np.sin(k * th)
    f = (a * ck + b * sk).sum(axis=-1)  # (N, n)
    fp = (k * (b * ck - a * sk)).sum(axis=-1)

    if kind == 0:
        xp = states[:, :n].copy()
    else:
        xp = (states[:, :n] - y[:n]) @ rot  # rot^T applied row-wise

    gv = err_w * (xp - f)
    s1 = np.sum(gv * fp, axis=1)
    w_sp = -conv[:n] * gv + trav[:n] * wsign * fp
    w_th = conv[n] * s1 + trav[n] * wsign

    if kc != 0.0:
        w_th = w_th - kc * (lap @ (thetas - theta_star))

    if kind == 0:
        vel = w_sp
    else:
        drift = omega_term(xp) - vel_term
        vel = (w_sp - drift) @ rot.T

    out_states = out[zdim:].reshape(num_agents, n + 1)
    out_states[:, :n] = vel
    out_states[:, n] = w_th
    return 0


def integrate(y0, t0, dt, n_steps, stride, n, num_agents, zdim, kind,
              path_terms, path_counts, prof_terms, prof_counts,
              err_w, conv, trav, kc, wsign, lap, theta_star,
              out_t, out_y):
    args = (n, num_agents, zdim, kind, path_terms, path_counts, prof_terms,
            prof_counts, err_w, conv, trav, kc, wsign, lap, theta_star)
    dim = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)

    out_t[0] = t0
    out_y[0, :] = y
    sample = 1
    for step in range(n_steps):
        t = t0 + step * dt
        st = _rhs(t, y, *args, k1)
        if st == 0:
            st = _rhs(t + 0.5 * dt, y + 0.5 * dt * k1, *args, k2)
        if st == 0:
            st = _rhs(t + 0.5 * dt, y + 0.5 * dt * k2, *args, k3)
        if st == 0:
            st = _rhs(t + dt, y + dt * k3, *args, k4)
        if st != 0:
            return st, sample, step
        y += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > _STATE_BOUND:
            return 1, sample, step
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            out_t[sample] = t0 + (step + 1) * dt
            out_y[sample, :] = y
            sample += 1
    return 0, sample, n_steps


def eval_rhs(t, y, *args):
    """Single derivative evaluation; returns (status, ydot)."""
    out = np.empty_like(np.asarray(y, dtype=float))
    status = _rhs(float(t), np.asarray(y, dtype=float), *args, out)
    return int(status), out
