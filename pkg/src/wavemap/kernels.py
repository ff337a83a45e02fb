"""Fused stencil kernels for the time-stepping hot loop.

These compute exactly the same five-point formulas as grid.derivative /
model.rhs_free (tests assert agreement to round-off); numba is used when
available, with a numpy fallback.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _accel_numba(u, v, w, ut, vt, wt, h, au, av, aw):
    m = u.shape[0]
    c1 = 1.0 / (12.0 * h)
    c2 = 1.0 / (12.0 * h * h)
    for j in range(2, m - 2):
        for k in range(2, m - 2):
            ux = (u[j - 2, k] - 8.0 * u[j - 1, k] + 8.0 * u[j + 1, k] - u[j + 2, k]) * c1
            vx = (v[j - 2, k] - 8.0 * v[j - 1, k] + 8.0 * v[j + 1, k] - v[j + 2, k]) * c1
            wx = (w[j - 2, k] - 8.0 * w[j - 1, k] + 8.0 * w[j + 1, k] - w[j + 2, k]) * c1
            uy = (u[j, k - 2] - 8.0 * u[j, k - 1] + 8.0 * u[j, k + 1] - u[j, k + 2]) * c1
            vy = (v[j, k - 2] - 8.0 * v[j, k - 1] + 8.0 * v[j, k + 1] - v[j, k + 2]) * c1
            wy = (w[j, k - 2] - 8.0 * w[j, k - 1] + 8.0 * w[j, k + 1] - w[j, k + 2]) * c1
            lap_u = (-u[j - 2, k] + 16.0 * u[j - 1, k] - 30.0 * u[j, k]
                     + 16.0 * u[j + 1, k] - u[j + 2, k]
                     - u[j, k - 2] + 16.0 * u[j, k - 1] - 30.0 * u[j, k]
                     + 16.0 * u[j, k + 1] - u[j, k + 2]) * c2
            lap_v = (-v[j - 2, k] + 16.0 * v[j - 1, k] - 30.0 * v[j, k]
                     + 16.0 * v[j + 1, k] - v[j + 2, k]
                     - v[j, k - 2] + 16.0 * v[j, k - 1] - 30.0 * v[j, k]
                     + 16.0 * v[j, k + 1] - v[j, k + 2]) * c2
            lap_w = (-w[j - 2, k] + 16.0 * w[j - 1, k] - 30.0 * w[j, k]
                     + 16.0 * w[j + 1, k] - w[j + 2, k]
                     - w[j, k - 2] + 16.0 * w[j, k - 1] - 30.0 * w[j, k]
                     + 16.0 * w[j, k + 1] - w[j, k + 2]) * c2
            lam = -0.5 * (ut[j, k] ** 2 + vt[j, k] ** 2 + wt[j, k] ** 2
                          - ux * ux - vx * vx - wx * wx
                          - uy * uy - vy * vy - wy * wy)
            au[j, k] = lap_u + 2.0 * lam * u[j, k]
            av[j, k] = lap_v + 2.0 * lam * v[j, k]
            aw[j, k] = lap_w + 2.0 * lam * w[j, k]


@njit(cache=True)
def _laplacian_numba(u, v, w, h, lu, lv, lw):
    m = u.shape[0]
    c2 = 1.0 / (12.0 * h * h)
    for j in range(2, m - 2):
        for k in range(2, m - 2):
            lu[j, k] = (-u[j - 2, k] + 16.0 * u[j - 1, k] - 30.0 * u[j, k]
                        + 16.0 * u[j + 1, k] - u[j + 2, k]
                        - u[j, k - 2] + 16.0 * u[j, k - 1] - 30.0 * u[j, k]
                        + 16.0 * u[j, k + 1] - u[j, k + 2]) * c2
            lv[j, k] = (-v[j - 2, k] + 16.0 * v[j - 1, k] - 30.0 * v[j, k]
                        + 16.0 * v[j + 1, k] - v[j + 2, k]
                        - v[j, k - 2] + 16.0 * v[j, k - 1] - 30.0 * v[j, k]
                        + 16.0 * v[j, k + 1] - v[j, k + 2]) * c2
            lw[j, k] = (-w[j - 2, k] + 16.0 * w[j - 1, k] - 30.0 * w[j, k]
                        + 16.0 * w[j + 1, k] - w[j + 2, k]
                        - w[j, k - 2] + 16.0 * w[j, k - 1] - 30.0 * w[j, k]
                        + 16.0 * w[j, k + 1] - w[j, k + 2]) * c2


def _d1(a, h, axis):
    out = np.zeros_like(a)
    s = a if axis == 0 else a.T
    o = out if axis == 0 else out.T
    I = slice(2, -2)
    o[I, I] = (s[:-4, I] - 8.0 * s[1:-3, I] + 8.0 * s[3:-1, I] - s[4:, I]) / (12.0 * h)
    return out


def _d2(a, h, axis):
    out = np.zeros_like(a)
    s = a if axis == 0 else a.T
    o = out if axis == 0 else out.T
    I = slice(2, -2)
    o[I, I] = (-s[:-4, I] + 16.0 * s[1:-3, I] - 30.0 * s[2:-2, I]
               + 16.0 * s[3:-1, I] - s[4:, I]) / (12.0 * h * h)
    return out


def _accel_numpy(u, v, w, ut, vt, wt, h, au, av, aw):
    grad2 = np.zeros_like(u)
    for a in (u, v, w):
        grad2 += _d1(a, h, 0) ** 2 + _d1(a, h, 1) ** 2
    lam = -0.5 * (ut ** 2 + vt ** 2 + wt ** 2 - grad2)
    I = slice(2, -2)
    for a, out in ((u, au), (v, av), (w, aw)):
        lap = _d2(a, h, 0) + _d2(a, h, 1)
        out[I, I] = (lap + 2.0 * lam * a)[I, I]


def _laplacian_numpy(u, v, w, h, lu, lv, lw):
    I = slice(2, -2)
    for a, out in ((u, lu), (v, lv), (w, lw)):
        out[I, I] = (_d2(a, h, 0) + _d2(a, h, 1))[I, I]


@njit(cache=True)
def rattle_positions(u, v, w, ut, vt, wt, h, dt, tol, max_iter,
                     u1, v1, w1, pu, pv, pw):
    """Half-kick + drift with the nodewise position-constraint projection.

    Writes the projected positions into (u1, v1, w1) and the half-updated
    momenta P* into (pu, pv, pw).  Returns (max Newton iterations used,
    number of nodes that failed to converge).
    """
    m = u.shape[0]
    c2 = 1.0 / (12.0 * h * h)
    c = dt * dt
    max_it = 0
    fail = 0
    for j in range(2, m - 2):
        for k in range(2, m - 2):
            lap_u = (-u[j - 2, k] + 16.0 * u[j - 1, k] - 30.0 * u[j, k]
                     + 16.0 * u[j + 1, k] - u[j + 2, k]
                     - u[j, k - 2] + 16.0 * u[j, k - 1] - 30.0 * u[j, k]
                     + 16.0 * u[j, k + 1] - u[j, k + 2]) * c2
            lap_v = (-v[j - 2, k] + 16.0 * v[j - 1, k] - 30.0 * v[j, k]
                     + 16.0 * v[j + 1, k] - v[j + 2, k]
                     - v[j, k - 2] + 16.0 * v[j, k - 1] - 30.0 * v[j, k]
                     + 16.0 * v[j, k + 1] - v[j, k + 2]) * c2
            lap_w = (-w[j - 2, k] + 16.0 * w[j - 1, k] - 30.0 * w[j, k]
                     + 16.0 * w[j + 1, k] - w[j + 2, k]
                     - w[j, k - 2] + 16.0 * w[j, k - 1] - 30.0 * w[j, k]
                     + 16.0 * w[j, k + 1] - w[j, k + 2]) * c2
            qu, qv, qw = u[j, k], v[j, k], w[j, k]
            p0u = ut[j, k] + 0.5 * dt * lap_u
            p0v = vt[j, k] + 0.5 * dt * lap_v
            p0w = wt[j, k] + 0.5 * dt * lap_w
            bu = qu + dt * p0u
            bv = qv + dt * p0v
            bw = qw + dt * p0w
            lam = 0.0
            it = 0
            xu, xv, xw = bu, bv, bw
            while True:
                xu = bu + c * lam * qu
                xv = bv + c * lam * qv
                xw = bw + c * lam * qw
                g = xu * xu + xv * xv + xw * xw - 1.0
                if abs(g) <= tol:
                    break
                if it >= max_iter:
                    fail += 1
                    break
                gp = 2.0 * c * (xu * qu + xv * qv + xw * qw)
                lam -= g / gp
                it += 1
            if it > max_it:
                max_it = it
            u1[j, k] = xu
            v1[j, k] = xv
            w1[j, k] = xw
            pu[j, k] = p0u + dt * lam * qu
            pv[j, k] = p0v + dt * lam * qv
            pw[j, k] = p0w + dt * lam * qw
    return max_it, fail


@njit(cache=True)
def rattle_velocities(u1, v1, w1, pu, pv, pw, h, dt, tol, max_iter,
                      ut1, vt1, wt1):
    """Second half-kick with the nodewise velocity-constraint projection."""
    m = u1.shape[0]
    c2 = 1.0 / (12.0 * h * h)
    max_it = 0
    fail = 0
    for j in range(2, m - 2):
        for k in range(2, m - 2):
            lap_u = (-u1[j - 2, k] + 16.0 * u1[j - 1, k] - 30.0 * u1[j, k]
                     + 16.0 * u1[j + 1, k] - u1[j + 2, k]
                     - u1[j, k - 2] + 16.0 * u1[j, k - 1] - 30.0 * u1[j, k]
                     + 16.0 * u1[j, k + 1] - u1[j, k + 2]) * c2
            lap_v = (-v1[j - 2, k] + 16.0 * v1[j - 1, k] - 30.0 * v1[j, k]
                     + 16.0 * v1[j + 1, k] - v1[j + 2, k]
                     - v1[j, k - 2] + 16.0 * v1[j, k - 1] - 30.0 * v1[j, k]
                     + 16.0 * v1[j, k + 1] - v1[j, k + 2]) * c2
            lap_w = (-w1[j - 2, k] + 16.0 * w1[j - 1, k] - 30.0 * w1[j, k]
                     + 16.0 * w1[j + 1, k] - w1[j + 2, k]
                     - w1[j, k - 2] + 16.0 * w1[j, k - 1] - 30.0 * w1[j, k]
                     + 16.0 * w1[j, k + 1] - w1[j, k + 2]) * c2
            qu, qv, qw = u1[j, k], v1[j, k], w1[j, k]
            du = pu[j, k] + 0.5 * dt * lap_u
            dv = pv[j, k] + 0.5 * dt * lap_v
            dw = pw[j, k] + 0.5 * dt * lap_w
            mu = 0.0
            it = 0
            yu, yv, yw = du, dv, dw
            while True:
                yu = du + dt * mu * qu
                yv = dv + dt * mu * qv
                yw = dw + dt * mu * qw
                g = 2.0 * (qu * yu + qv * yv + qw * yw)
                if abs(g) <= tol:
                    break
                if it >= max_iter:
                    fail += 1
                    break
                gp = 2.0 * dt * (qu * qu + qv * qv + qw * qw)
                mu -= g / gp
                it += 1
            if it > max_it:
                max_it = it
            ut1[j, k] = yu
            vt1[j, k] = yv
            wt1[j, k] = yw
    return max_it, fail


accel3 = _accel_numba if HAVE_NUMBA else _accel_numpy
laplacian3 = _laplacian_numba if HAVE_NUMBA else _laplacian_numpy
