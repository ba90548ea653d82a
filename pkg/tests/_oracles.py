"""Independent reference implementations used to pin derived values.

Nothing here may call into the package's solvers: the axis oracle scans a
time grid and bisects position residuals, and the thrust-direction oracle
densely samples the sphere with its own vectorized two-phase arithmetic.
"""

from __future__ import annotations

import math

import numpy as np


def axis_min_time_oracle(ps, vs, pe, ve, a_plus, a_minus, step=1e-3):
    """Brute-force minimum time for one axis with accels +a_plus / -a_minus.

    Scans candidate first-phase durations on a uniform grid, completes the
    second phase from the velocity constraint, and bisects sign changes of
    the position residual.  Returns inf when nothing feasible is found.
    """
    dp = pe - ps
    amin = min(a_plus, a_minus)
    T_hi = (abs(vs) + abs(ve)) / amin
    T_hi += 2.0 * math.sqrt((abs(dp) + (vs * vs + ve * ve) / amin) / amin) + 1.0
    best = math.inf

    for A1, A2 in ((a_plus, -a_minus), (-a_minus, a_plus)):

        def residual(x):
            v1 = vs + A1 * x
            t2 = (ve - v1) / A2
            return ps + vs * x + 0.5 * A1 * x * x + v1 * t2 + 0.5 * A2 * t2 * t2 - pe

        # single-phase candidate (t2 = 0)
        t1x = (ve - vs) / A1
        if t1x >= 0.0:
            err = dp - (vs * t1x + 0.5 * A1 * t1x * t1x)
            if abs(err) < 1e-9 * max(1.0, abs(dp)):
                best = min(best, t1x)

        t1 = np.arange(0.0, T_hi, step)
        v1 = vs + A1 * t1
        t2 = (ve - v1) / A2
        valid = t2 >= 0.0
        pend = ps + vs * t1 + 0.5 * A1 * t1 * t1 + v1 * t2 + 0.5 * A2 * t2 * t2
        e = pend - pe
        T_all = t1 + t2

        hit = valid & (np.abs(e) < 1e-9)
        if hit.any():
            best = min(best, float(T_all[hit].min()))

        cross = valid[:-1] & valid[1:] & (e[:-1] * e[1:] < 0.0)
        for i in np.flatnonzero(cross):
            lo, hi = float(t1[i]), float(t1[i + 1])
            flo = residual(lo)
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = residual(mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            x = 0.5 * (lo + hi)
            tt2 = (ve - (vs + A1 * x)) / A2
            if tt2 >= -1e-12:
                best = min(best, x + max(tt2, 0.0))
    return best


def _vec_two_phase(dp, vs, ve, A1, A2):
    """Vectorized fixed-ordering minimum time over arrays of accelerations."""
    with np.errstate(divide="ignore", invalid="ignore"):
        k = 0.5 / A1 - 0.5 / A2
        rhs = dp + vs * vs * (0.5 / A1) - ve * ve * (0.5 / A2)
        vp2 = rhs / k
        ok = (
            (np.abs(A1) > 1e-12)
            & (np.abs(A2) > 1e-12)
            & (np.abs(k) > 1e-14)
            & (vp2 >= -1e-12)
        )
        vp = np.sqrt(np.maximum(vp2, 0.0))
        T = np.full(A1.shape, np.inf)
        for sgn in (1.0, -1.0):
            v = sgn * vp
            t1 = (v - vs) / A1
            t2 = (ve - v) / A2
            good = ok & (t1 >= -1e-9) & (t2 >= -1e-9)
            Tc = np.maximum(t1, 0.0) + np.maximum(t2, 0.0)
            T = np.where(good & (Tc < T), Tc, T)
    return T


def _eval_dirs(dirs, ps, vs, pe, ve, a_max, g):
    at = a_max * dirs
    T = np.zeros(dirs.shape[0])
    for ax in range(3):
        A = at[:, ax] + g[ax]
        B = -at[:, ax] + g[ax]
        dp = pe[ax] - ps[ax]
        Ti = np.minimum(
            _vec_two_phase(dp, vs[ax], ve[ax], A, B),
            _vec_two_phase(dp, vs[ax], ve[ax], B, A),
        )
        T = np.maximum(T, Ti)
    return T


def _fib_sphere(n):
    i = np.arange(n)
    golden = (1.0 + 5.0 ** 0.5) / 2.0
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = 2.0 * np.pi * i / golden
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def _fib_cap(center, ang, n):
    """n directions covering the spherical cap of angular radius `ang`."""
    u = center / np.linalg.norm(center)
    tmp = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(u, tmp)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    i = np.arange(n)
    golden = (1.0 + 5.0 ** 0.5) / 2.0
    rho = ang * np.sqrt((i + 0.5) / n)
    phi = 2.0 * np.pi * i / golden
    tang = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)
    return np.cos(rho)[:, None] * u + np.sin(rho)[:, None] * tang


def sphere_sampling_oracle(ps, vs, pe, ve, a_max, g, n=10000, refine=True):
    """Minimum synchronized time over a dense sampling of thrust directions.

    Independent of the package's gradient-descent path.  A global Fibonacci
    pass locates the valley; optional zoom passes around the best direction
    push the sampling error well below the comparison tolerance (the valley
    floor is kinked, so coverage error is linear in angular spacing).
    """
    dirs = _fib_sphere(n)
    T = _eval_dirs(dirs, ps, vs, pe, ve, a_max, g)
    feasible = np.isfinite(T)
    if not feasible.any():
        return math.inf
    best_i = int(np.argmin(np.where(feasible, T, np.inf)))
    best_T = float(T[best_i])
    best_dir = dirs[best_i]
    if refine:
        ang = 4.0 * math.pi / math.sqrt(float(n))
        for _ in range(3):
            cap = _fib_cap(best_dir, ang, n // 4)
            Tc = _eval_dirs(cap, ps, vs, pe, ve, a_max, g)
            j = int(np.argmin(np.where(np.isfinite(Tc), Tc, np.inf)))
            if math.isfinite(Tc[j]) and Tc[j] < best_T:
                best_T = float(Tc[j])
                best_dir = cap[j]
            ang *= 0.12
    return best_T
