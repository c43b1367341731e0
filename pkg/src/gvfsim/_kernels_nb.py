"""Numba-compiled stepping kernels (default backend).

Signatures mirror `_kernels_np`; see `lowering.LoweredScenario.kernel_args`
for the shared argument block.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_PITCH_LIMIT = np.pi / 2 - 0.1
_STATE_BOUND = 1e6


@njit(cache=True)
def _profile_value(prof_terms, prof_counts, ch, t):
    total = 0.0
    for j in range(prof_counts[ch]):
        code = prof_terms[ch, j, 0]
        amp = prof_terms[ch, j, 1]
        arg = prof_terms[ch, j, 2] * t + prof_terms[ch, j, 3]
        if code == 0.0:
            total += amp
        elif code == 1.0:
            total += amp * np.sin(arg)
        else:
            total += amp * np.cos(arg)
    return total


@njit(cache=True)
def _rhs(t, y, n, num_agents, zdim, kind, path_terms, path_counts,
         prof_terms, prof_counts, err_w, conv, trav, kc, wsign,
         lap, theta_star, out):
    # target block
    c11 = 1.0; c12 = 0.0; c13 = 0.0
    c21 = 0.0; c22 = 1.0; c23 = 0.0
    c31 = 0.0; c32 = 0.0; c33 = 1.0
    om = 0.0
    p = 0.0; q = 0.0; r = 0.0
    u0 = 0.0; u1 = 0.0; u2 = 0.0
    if kind == 1:
        v = _profile_value(prof_terms, prof_counts, 0, t)
        om = _profile_value(prof_terms, prof_counts, 1, t)
        ch = np.cos(y[2]); sh = np.sin(y[2])
        out[0] = v * ch
        out[1] = v * sh
        out[2] = om
        # rotation frame->inertial: [[ch, -sh], [sh, ch]]
        c11 = ch; c12 = -sh
        c21 = sh; c22 = ch
        u0 = v
    elif kind == 2:
        if abs(y[4]) >= _PITCH_LIMIT:
            return 2
        u0 = _profile_value(prof_terms, prof_counts, 0, t)
        u1 = _profile_value(prof_terms, prof_counts, 1, t)
        u2 = _profile_value(prof_terms, prof_counts, 2, t)
        p = _profile_value(prof_terms, prof_counts, 3, t)
        q = _profile_value(prof_terms, prof_counts, 4, t)
        r = _profile_value(prof_terms, prof_counts, 5, t)
        cr = np.cos(y[3]); sr = np.sin(y[3])
        cp = np.cos(y[4]); sp = np.sin(y[4])
        cy = np.cos(y[5]); sy = np.sin(y[5])
        c11 = cy * cp; c12 = cy * sp * sr - sy * cr; c13 = cy * sp * cr + sy * sr
        c21 = sy * cp; c22 = sy * sp * sr + cy * cr; c23 = sy * sp * cr - cy * sr
        c31 = -sp;     c32 = cp * sr;                c33 = cp * cr
        out[0] = c11 * u0 + c12 * u1 + c13 * u2
        out[1] = c21 * u0 + c22 * u1 + c23 * u2
        out[2] = c31 * u0 + c32 * u1 + c33 * u2
        out[3] = p + (r * cr + q * sr) * (sp / cp)
        out[4] = q * cr - r * sr
        out[5] = (r * cr + q * sr) / cp

    f = np.empty(n)
    fp = np.empty(n)
    xp = np.empty(n)
    w = np.empty(n)

    for i in range(num_agents):
        base = zdim + i * (n + 1)
        theta = y[base + n]

        # consensus correction for this agent
        ci = 0.0
        if kc != 0.0:
            for jj in range(num_agents):
                ci -= lap[i, jj] * (y[zdim + jj * (n + 1) + n] - theta_star[jj])

        # path point and tangent
        for ax in range(n):
            fi = 0.0
            fpi = 0.0
            for jt in range(path_counts[ax]):
                a = path_terms[ax, jt, 0]
                b = path_terms[ax, jt, 1]
                k = path_terms[ax, jt, 2]
                ck = np.cos(k * theta)
                sk = np.sin(k * theta)
                fi += a * ck + b * sk
                fpi += k * (b * ck - a * sk)
            f[ax] = fi
            fp[ax] = fpi

        # path-frame position
        if kind == 0:
            for ax in range(n):
                xp[ax] = y[base + ax]
        elif kind == 1:
            rel0 = y[base] - y[0]
            rel1 = y[base + 1] - y[1]
            xp[0] = c11 * rel0 + c21 * rel1
            xp[1] = c12 * rel0 + c22 * rel1
        else:
            rel0 = y[base] - y[0]
            rel1 = y[base + 1] - y[1]
            rel2 = y[base + 2] - y[2]
            xp[0] = c11 * rel0 + c21 * rel1 + c31 * rel2
            xp[1] = c12 * rel0 + c22 * rel1 + c32 * rel2
            xp[2] = c13 * rel0 + c23 * rel1 + c33 * rel2

        # extended guiding field
        s1 = 0.0
        for ax in range(n):
            gv = err_w[ax] * (xp[ax] - f[ax])
            s1 += gv * fp[ax]
            w[ax] = -conv[ax] * gv + trav[ax] * wsign * fp[ax]
        w_th = conv[n] * s1 + trav[n] * wsign  # -conv * (-s1)

        # frame compensation and output
        if kind == 0:
            for ax in range(n):
                out[base + ax] = w[ax]
        elif kind == 1:
            d0 = om * xp[1] - u0  # drift; rotated target velocity is (speed, 0)
            d1 = -om * xp[0]
            a0 = w[0] - d0
            a1 = w[1] - d1
            out[base] = c11 * a0 + c12 * a1
            out[base + 1] = c21 * a0 + c22 * a1
        else:
            d0 = (-r * xp[1] + q * xp[2]) * -1.0 - u0
            d1 = (r * xp[0] - p * xp[2]) * -1.0 - u1
            d2 = (-q * xp[0] + p * xp[1]) * -1.0 - u2
            a0 = w[0] - d0
            a1 = w[1] - d1
            a2 = w[2] - d2
            out[base] = c11 * a0 + c12 * a1 + c13 * a2
            out[base + 1] = c21 * a0 + c22 * a1 + c23 * a2
            out[base + 2] = c31 * a0 + c32 * a1 + c33 * a2
        out[base + n] = w_th + kc * ci
    return 0


@njit(cache=True)
def integrate(y0, t0, dt, n_steps, stride, n, num_agents, zdim, kind,
              path_terms, path_counts, prof_terms, prof_counts,
              err_w, conv, trav, kc, wsign, lap, theta_star,
              out_t, out_y):
    dim = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)

    out_t[0] = t0
    out_y[0, :] = y
    sample = 1
    for step in range(n_steps):
        t = t0 + step * dt
        st = _rhs(t, y, n, num_agents, zdim, kind, path_terms, path_counts,
                  prof_terms, prof_counts, err_w, conv, trav, kc, wsign,
                  lap, theta_star, k1)
        if st != 0:
            return st, sample, step
        for jj in range(dim):
            tmp[jj] = y[jj] + 0.5 * dt * k1[jj]
        st = _rhs(t + 0.5 * dt, tmp, n, num_agents, zdim, kind, path_terms,
                  path_counts, prof_terms, prof_counts, err_w, conv, trav,
                  kc, wsign, lap, theta_star, k2)
        if st != 0:
            return st, sample, step
        for jj in range(dim):
            tmp[jj] = y[jj] + 0.5 * dt * k2[jj]
        st = _rhs(t + 0.5 * dt, tmp, n, num_agents, zdim, kind, path_terms,
                  path_counts, prof_terms, prof_counts, err_w, conv, trav,
                  kc, wsign, lap, theta_star, k3)
        if st != 0:
            return st, sample, step
        for jj in range(dim):
            tmp[jj] = y[jj] + dt * k3[jj]
        st = _rhs(t + dt, tmp, n, num_agents, zdim, kind, path_terms,
                  path_counts, prof_terms, prof_counts, err_w, conv, trav,
                  kc, wsign, lap, theta_star, k4)
        if st != 0:
            return st, sample, step
        ok = True
        for jj in range(dim):
            y[jj] = y[jj] + (dt / 6.0) * (k1[jj] + 2.0 * (k2[jj] + k3[jj]) + k4[jj])
            if not np.isfinite(y[jj]) or abs(y[jj]) > _STATE_BOUND:
                ok = False
        if not ok:
            return 1, sample, step
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            out_t[sample] = t0 + (step + 1) * dt
            out_y[sample, :] = y
            sample += 1
    return 0, sample, n_steps


def eval_rhs(t, y, *args):
    """Single derivative evaluation; returns (status, ydot)."""
    out = np.empty_like(np.asarray(y, dtype=float))
    status = _rhs(float(t), np.ascontiguousarray(y, dtype=float), *args, out)
    return int(status), out
