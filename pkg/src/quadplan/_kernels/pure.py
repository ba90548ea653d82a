"""Pure numpy/Python implementation of the kernel API.

This is the reference backend: every function here has an identical twin in
the compiled extension (`_native.pyx`) and the two must agree to floating
point roundoff.  Hot loops live at this boundary on purpose; callers above
it are backend-agnostic.

State vectors are laid out as 13 floats:
    [px, py, pz, qw, qx, qy, qz, vx, vy, vz, wx, wy, wz]
with the quaternion scalar-first and body rates in the body frame.

Quadrotor parameter packs `qp` are 9 floats:
    [m, Jx, Jy, Jz, l, kappa, gx, gy, gz]
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_EPS = 1e-12


# ---------------------------------------------------------------------------
# ESDF sampling
# ---------------------------------------------------------------------------


def esdf_at(dist, ox, oy, oz, res, x, y, z):
    """Trilinear distance lookup; returns -1.0 outside the physical bounds.

    Sample points live at voxel centers.  Queries inside the outer half-voxel
    shell clamp to the center hull, i.e. constant extrapolation.
    """
    nx, ny, nz = dist.shape
    fx = (x - ox) / res
    fy = (y - oy) / res
    fz = (z - oz) / res
    if fx < 0.0 or fy < 0.0 or fz < 0.0 or fx > nx or fy > ny or fz > nz:
        return -1.0
    # shift to voxel-center coordinates, clamp to the interpolation hull
    ux = min(max(fx - 0.5, 0.0), nx - 1.0)
    uy = min(max(fy - 0.5, 0.0), ny - 1.0)
    uz = min(max(fz - 0.5, 0.0), nz - 1.0)
    ix = min(int(ux), nx - 2) if nx > 1 else 0
    iy = min(int(uy), ny - 2) if ny > 1 else 0
    iz = min(int(uz), nz - 2) if nz > 1 else 0
    ax = ux - ix
    ay = uy - iy
    az = uz - iz
    jx = min(ix + 1, nx - 1)
    jy = min(iy + 1, ny - 1)
    jz = min(iz + 1, nz - 1)
    c00 = dist[ix, iy, iz] * (1 - ax) + dist[jx, iy, iz] * ax
    c10 = dist[ix, jy, iz] * (1 - ax) + dist[jx, jy, iz] * ax
    c01 = dist[ix, iy, jz] * (1 - ax) + dist[jx, iy, jz] * ax
    c11 = dist[ix, jy, jz] * (1 - ax) + dist[jx, jy, jz] * ax
    c0 = c00 * (1 - ay) + c10 * ay
    c1 = c01 * (1 - ay) + c11 * ay
    return c0 * (1 - az) + c1 * az


def segment_free(dist, ox, oy, oz, res, ax, ay, az, bx, by, bz, d_c, step):
    """True iff every sample on [a, b] clears d_c.

    Samples are evenly spaced with both endpoints included, so the check is
    symmetric in (a, b).
    """
    dx = bx - ax
    dy = by - ay
    dz = bz - az
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    n = int(math.ceil(length / step)) if length > 0.0 else 0
    for i in range(n + 1):
        t = i / n if n > 0 else 0.0
        px = ax * (1.0 - t) + bx * t
        py = ay * (1.0 - t) + by * t
        pz = az * (1.0 - t) + bz * t
        if esdf_at(dist, ox, oy, oz, res, px, py, pz) <= d_c:
            return False
    return True


def first_blocked(dist, ox, oy, oz, res, pts, d_c):
    """Index of the first point with clearance <= d_c, or -1 if all free."""
    n = pts.shape[0]
    for i in range(n):
        if esdf_at(dist, ox, oy, oz, res, pts[i, 0], pts[i, 1], pts[i, 2]) <= d_c:
            return i
    return -1


# ---------------------------------------------------------------------------
# Per-axis bang-bang primitives
# ---------------------------------------------------------------------------


def _axis_one_ordering(dp, vs, ve, a1, a2):
    """Minimum time for a two-phase profile with fixed phase accelerations.

    Returns (T, t1) or (inf, 0) when no nonnegative-duration profile meets
    the boundary conditions.  Handles degenerate phases (zero acceleration).
    """
    dv = ve - vs
    tol = 1e-9 * max(1.0, abs(vs), abs(ve), abs(dp))

    if abs(a1) < _EPS and abs(a2) < _EPS:
        if abs(dv) > tol:
            return math.inf, 0.0
        if abs(vs) < _EPS:
            return (0.0, 0.0) if abs(dp) <= tol else (math.inf, 0.0)
        T = dp / vs
        return (max(T, 0.0), 0.0) if T >= -tol else (math.inf, 0.0)

    if abs(a1) < _EPS:
        # coast, then accelerate
        t2 = dv / a2
        if t2 < -tol:
            return math.inf, 0.0
        t2 = max(t2, 0.0)
        rem = dp - (vs * t2 + 0.5 * a2 * t2 * t2)
        if abs(vs) < _EPS:
            return (t2, 0.0) if abs(rem) <= tol else (math.inf, 0.0)
        t1 = rem / vs
        if t1 < -tol:
            return math.inf, 0.0
        t1 = max(t1, 0.0)
        return t1 + t2, t1

    if abs(a2) < _EPS:
        # accelerate, then coast
        t1 = dv / a1
        if t1 < -tol:
            return math.inf, 0.0
        t1 = max(t1, 0.0)
        rem = dp - (vs * t1 + 0.5 * a1 * t1 * t1)
        if abs(ve) < _EPS:
            return (t1, t1) if abs(rem) <= tol else (math.inf, 0.0)
        t2 = rem / ve
        if t2 < -tol:
            return math.inf, 0.0
        return t1 + max(t2, 0.0), t1

    k = 0.5 / a1 - 0.5 / a2
    rhs = dp + vs * vs * (0.5 / a1) - ve * ve * (0.5 / a2)

    if abs(k) < _EPS:
        # equal-acceleration corner case: single ramp must satisfy both
        T = dv / a1
        if T < -tol:
            return math.inf, 0.0
        T = max(T, 0.0)
        if abs(dp - (vs * T + 0.5 * a1 * T * T)) > max(tol, 1e-7 * max(1.0, abs(dp))):
            return math.inf, 0.0
        return T, T

    vp2 = rhs / k
    if vp2 < -1e-12 * max(1.0, abs(rhs)):
        return math.inf, 0.0
    vp_mag = math.sqrt(max(vp2, 0.0))

    best_T = math.inf
    best_t1 = 0.0
    for vp in (vp_mag, -vp_mag):
        t1 = (vp - vs) / a1
        t2 = (ve - vp) / a2
        if t1 < -1e-9 or t2 < -1e-9:
            continue
        t1 = max(t1, 0.0)
        t2 = max(t2, 0.0)
        if t1 + t2 < best_T:
            best_T = t1 + t2
            best_t1 = t1
        if vp_mag < _EPS:
            break
    return best_T, best_t1


def axis_fastest(ps, vs, pe, ve, a_first, a_second):
    """Fastest two-phase profile over both phase orderings.

    `a_first`/`a_second` are the two signed accelerations available.  Returns
    (T, t1, a1, a2); T is inf when neither ordering is feasible.
    """
    dp = pe - ps
    T_a, t1_a = _axis_one_ordering(dp, vs, ve, a_first, a_second)
    T_b, t1_b = _axis_one_ordering(dp, vs, ve, a_second, a_first)
    if T_a <= T_b:
        if math.isinf(T_a):
            return math.inf, 0.0, a_first, a_second
        return T_a, t1_a, a_first, a_second
    return T_b, t1_b, a_second, a_first


def _axis_grad_fd(dp, vs, ve, at, g, h):
    Tp, _, _, _ = axis_fastest(0.0, vs, dp, ve, (at + h) + g, -(at + h) + g)
    Tm, _, _, _ = axis_fastest(0.0, vs, dp, ve, (at - h) + g, -(at - h) + g)
    if math.isinf(Tp) or math.isinf(Tm):
        return 0.0
    return (Tp - Tm) / (2.0 * h)


def axis_time_grad(ps, vs, pe, ve, at, g):
    """Minimum axis time and dT/d(at) for phase accelerations (at+g, -at+g).

    The derivative follows the active ordering analytically through the
    switch-velocity root; degenerate branches fall back to a central
    difference of the closed form.
    """
    dp = pe - ps
    a_plus = at + g
    a_minus = -at + g
    T, t1, a1, a2 = axis_fastest(0.0, vs, dp, ve, a_plus, a_minus)
    if math.isinf(T):
        return math.inf, 0.0
    s1 = 1.0 if a1 == a_plus else -1.0
    s2 = -s1

    fd_h = 1e-6 * max(1.0, abs(at))
    if abs(a1) < 1e-8 or abs(a2) < 1e-8:
        return T, _axis_grad_fd(dp, vs, ve, at, g, fd_h)

    k = 0.5 / a1 - 0.5 / a2
    rhs = dp + vs * vs * (0.5 / a1) - ve * ve * (0.5 / a2)
    if abs(k) < 1e-10:
        return T, _axis_grad_fd(dp, vs, ve, at, g, fd_h)
    vp = vs + a1 * t1
    if abs(vp) < 1e-8:
        return T, _axis_grad_fd(dp, vs, ve, at, g, fd_h)

    dk = -s1 * 0.5 / (a1 * a1) + s2 * 0.5 / (a2 * a2)
    drhs = -vs * vs * s1 * 0.5 / (a1 * a1) + ve * ve * s2 * 0.5 / (a2 * a2)
    dvp2 = (drhs * k - rhs * dk) / (k * k)
    dvp = dvp2 / (2.0 * vp)
    dt1 = dvp / a1 - (vp - vs) * s1 / (a1 * a1)
    dt2 = -dvp / a2 - (ve - vp) * s2 / (a2 * a2)
    return T, dt1 + dt2


def axis_stretch(ps, vs, pe, ve, g, sigma_pref, b_orig, T_target):
    """Slow one axis down to exactly T_target by lowering thrust magnitude.

    Keeps the two-phase structure (+/-b around gravity g) and solves the
    switch time in closed form.  Returns (ok, b, t1, sigma); candidates with
    b above the original magnitude are rejected so the stretched axis never
    consumes more of the thrust budget than before.
    """
    T = T_target
    dp = pe - ps
    dv = ve - vs
    c1 = dv - g * T
    c2 = 2.0 * (dp - vs * T - 0.5 * g * T * T)

    cands = []
    if abs(c1) < 1e-10 * max(1.0, abs(dv), abs(g) * T):
        t1 = 0.5 * T
        u = 2.0 * c2 / (T * T) if T > _EPS else 0.0
        cands.append((t1, u))
    else:
        # 2*c1*t1^2 + (2*c2 - 4*c1*T)*t1 + (c1*T^2 - c2*T) = 0
        A = 2.0 * c1
        B = 2.0 * c2 - 4.0 * c1 * T
        C = c1 * T * T - c2 * T
        disc = B * B - 4.0 * A * C
        if disc < 0.0:
            return False, 0.0, 0.0, 1.0
        sq = math.sqrt(disc)
        for root in ((-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)):
            if -1e-9 <= root <= T + 1e-9:
                t1 = min(max(root, 0.0), T)
                den = 2.0 * t1 - T
                u = c1 / den if abs(den) > 1e-10 * max(T, 1.0) else 2.0 * c2 / (T * T)
                cands.append((t1, u))

    best = None
    for t1, u in cands:
        b = abs(u)
        if b > b_orig + 1e-9:
            continue
        sigma = 1.0 if u >= 0.0 else -1.0
        # verify the boundary is actually reproduced (guards sign flips)
        a1 = u + g
        a2 = -u + g
        v1 = vs + a1 * t1
        p1 = ps + vs * t1 + 0.5 * a1 * t1 * t1
        t2 = T - t1
        pe_chk = p1 + v1 * t2 + 0.5 * a2 * t2 * t2
        ve_chk = v1 + a2 * t2
        err = abs(pe_chk - pe) + abs(ve_chk - ve)
        if err > 1e-6 * max(1.0, abs(pe), abs(ve)):
            continue
        match = sigma == sigma_pref or b < 1e-12
        key = (not match, b)
        if best is None or key < best[0]:
            best = (key, b, t1, sigma)
    if best is None:
        return False, 0.0, 0.0, 1.0
    return True, best[1], best[2], best[3]


def _min_norm_hull(points):
    """Minimum-norm point of the convex hull of up to three vectors in R^3."""
    best = None
    best_n2 = math.inf
    k = len(points)
    for i in range(k):
        n2 = float(np.dot(points[i], points[i]))
        if n2 < best_n2:
            best, best_n2 = points[i], n2
    for i in range(k):
        for j in range(i + 1, k):
            d = points[j] - points[i]
            dd = float(np.dot(d, d))
            if dd < 1e-24:
                continue
            t = -float(np.dot(points[i], d)) / dd
            if 0.0 < t < 1.0:
                cand = points[i] + t * d
                n2 = float(np.dot(cand, cand))
                if n2 < best_n2:
                    best, best_n2 = cand, n2
    if k == 3:
        u = points[1] - points[0]
        v = points[2] - points[0]
        a = float(np.dot(u, u))
        b = float(np.dot(u, v))
        c = float(np.dot(v, v))
        det = a * c - b * b
        if abs(det) > 1e-24:
            ru = -float(np.dot(points[0], u))
            rv = -float(np.dot(points[0], v))
            s = (ru * c - rv * b) / det
            t = (rv * a - ru * b) / det
            if s > 0.0 and t > 0.0 and s + t < 1.0:
                cand = points[0] + s * u + t * v
                n2 = float(np.dot(cand, cand))
                if n2 < best_n2:
                    best, best_n2 = cand, n2
    return best


def pmm_gd(ps, vs, pe, ve, a_max, g, max_iters, step_tol, trace):
    """Projected gradient descent for the thrust direction on the sphere.

    Minimizes the synchronized axis time max_i T_i over thrust vectors with
    ||a_t|| = a_max.  The iterate stays on the sphere exactly (renormalized
    every step).  `trace`, when not None, receives the cost of each accepted
    iterate; the number of entries written is returned.

    Returns (at, T, n_trace, converged).
    """

    def cost(at):
        worst = -math.inf
        for i in range(3):
            T, _, _, _ = axis_fastest(ps[i], vs[i], pe[i], ve[i], at[i] + g[i], -at[i] + g[i])
            if T > worst:
                worst = T
        return worst

    def descent_dir(at):
        """Cost and steepest-descent step of max_i T_i on the sphere.

        Away from ties this is the slowest axis' projected gradient.  Where
        axes tie, a single-axis subgradient stalls on the ridge, so the
        direction is the min-norm point of the convex hull of the active
        axes' projected gradients (standard nonsmooth steepest descent).
        """
        times = np.empty(3)
        for i in range(3):
            T, _, _, _ = axis_fastest(ps[i], vs[i], pe[i], ve[i], at[i] + g[i], -at[i] + g[i])
            times[i] = T
        worst = float(np.max(times))
        if math.isinf(worst):
            return worst, np.zeros(3)
        # near-ties join the active set: the hull direction still decreases
        # every included axis, so the superset stays a descent direction
        active = [i for i in range(3) if times[i] >= worst * (1.0 - 1e-3)]
        n = at / a_max
        grads = []
        for i in active:
            _, gi = axis_time_grad(ps[i], vs[i], pe[i], ve[i], at[i], g[i])
            gvec = np.zeros(3)
            gvec[i] = gi
            grads.append(gvec - np.dot(gvec, n) * n)
        return worst, _min_norm_hull(grads)

    def descend(at0, T0, trace_buf):
        """Backtracking descent from one start; returns (at, T, n, converged)."""
        at = at0
        T_cur = T0
        n_tr = 0
        if trace_buf is not None:
            trace_buf[n_tr] = T_cur
            n_tr += 1
        converged = False
        eta = None
        for _ in range(int(max_iters)):
            T_cur, gt = descent_dir(at)
            gnorm = np.linalg.norm(gt)
            if gnorm < 1e-10:
                converged = True
                break
            if eta is None:
                eta = 0.25 * a_max / gnorm
            eta = min(eta * 2.0, a_max / gnorm)
            accepted = False
            for _ in range(30):
                cand = at - eta * gt
                cn = np.linalg.norm(cand)
                if cn < 1e-12:
                    eta *= 0.5
                    continue
                cand *= a_max / cn
                T_new = cost(cand)
                if T_new < T_cur:
                    step = np.linalg.norm(cand - at)
                    at = cand
                    T_cur = T_new
                    if trace_buf is not None and n_tr < trace_buf.shape[0]:
                        trace_buf[n_tr] = T_new
                        n_tr += 1
                    accepted = True
                    if step < step_tol * a_max:
                        converged = True
                    break
                eta *= 0.5
            if not accepted or converged:
                converged = True
                break
        return at, T_cur, n_tr, converged

    dp = np.asarray(pe, dtype=float) - np.asarray(ps, dtype=float)
    gv = np.asarray(g, dtype=float)
    up = np.array([0.0, 0.0, 1.0])

    # candidate starts: the aim-at-goal heuristic with increasing vertical
    # tilt, plus the best of a coarse direction scan (the landscape is
    # multi-modal for aggressive velocity reversals)
    inits = []
    d0 = dp - gv
    n0 = np.linalg.norm(d0)
    if n0 > 1e-9:
        u0 = d0 / n0
        inits.append(u0)
        for lam in (0.5, 1.0):
            cand = u0 + lam * up
            cn = np.linalg.norm(cand)
            if cn > 1e-9:
                inits.append(cand / cn)
    inits.append(up)

    n_fib = 128
    idx = np.arange(n_fib)
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    fz = 1.0 - (2.0 * idx + 1.0) / n_fib
    fth = 2.0 * np.pi * idx / golden
    fr = np.sqrt(np.maximum(1.0 - fz * fz, 0.0))
    fib = np.stack([fr * np.cos(fth), fr * np.sin(fth), fz], axis=1)

    scored = []
    for u in inits:
        scored.append((cost(u * a_max), u))
    fib_costs = np.array([cost(u * a_max) for u in fib])
    order = np.argsort(fib_costs, kind="stable")
    for i in order[:2]:
        if math.isfinite(fib_costs[i]):
            scored.append((float(fib_costs[i]), fib[i]))
    scored = [(c, u) for c, u in scored if math.isfinite(c)]
    if not scored:
        return np.zeros(3), math.inf, 0, False
    scored.sort(key=lambda cu: cu[0])

    starts = []
    for c, u in scored:
        if any(np.dot(u, v) > 0.996 for _, v in starts):
            continue
        starts.append((c, u))
        if len(starts) == 3:
            break

    cap = int(max_iters) + 1 if trace is None else trace.shape[0]
    buf_a = np.empty(cap)
    buf_b = np.empty(cap)
    best = None
    for c, u in starts:
        at_r, T_r, n_r, conv_r = descend(u * a_max, c, buf_a)
        if best is None or T_r < best[1]:
            best = (at_r, T_r, n_r, conv_r)
            buf_a, buf_b = buf_b, buf_a  # keep the winner's trace in buf_b
    at_b, T_b, n_b, conv_b = best
    if trace is not None:
        trace[:n_b] = buf_b[:n_b]
    return at_b, T_b, n_b, conv_b


# ---------------------------------------------------------------------------
# Rigid-body quadrotor integration
# ---------------------------------------------------------------------------


def _quad_deriv(s, f, qp, out):
    m = qp[0]
    jx, jy, jz = qp[1], qp[2], qp[3]
    arm = qp[4] / math.sqrt(2.0)
    kappa = qp[5]
    f1, f2, f3, f4 = f[0], f[1], f[2], f[3]
    ft = f1 + f2 + f3 + f4
    tx = arm * (f1 - f2 - f3 + f4)
    ty = arm * (-f1 - f2 + f3 + f4)
    tz = kappa * (f1 - f2 + f3 - f4)

    qw, qx, qy, qz = s[3], s[4], s[5], s[6]
    wx, wy, wz = s[10], s[11], s[12]

    # R(q) e_z * ft / m + g
    az_x = 2.0 * (qx * qz + qw * qy)
    az_y = 2.0 * (qy * qz - qw * qx)
    az_z = 1.0 - 2.0 * (qx * qx + qy * qy)

    out[0] = s[7]
    out[1] = s[8]
    out[2] = s[9]
    out[3] = 0.5 * (-qx * wx - qy * wy - qz * wz)
    out[4] = 0.5 * (qw * wx + qy * wz - qz * wy)
    out[5] = 0.5 * (qw * wy - qx * wz + qz * wx)
    out[6] = 0.5 * (qw * wz + qx * wy - qy * wx)
    out[7] = az_x * ft / m + qp[6]
    out[8] = az_y * ft / m + qp[7]
    out[9] = az_z * ft / m + qp[8]
    out[10] = (tx - (wy * jz * wz - wz * jy * wy)) / jx
    out[11] = (ty - (wz * jx * wx - wx * jz * wz)) / jy
    out[12] = (tz - (wx * jy * wy - wy * jx * wx)) / jz


def rk4_step_arr(state, f, dt, qp):
    """One RK4 step of the rigid-body dynamics; renormalizes the quaternion."""
    s = np.asarray(state, dtype=float)
    k1 = np.empty(13)
    k2 = np.empty(13)
    k3 = np.empty(13)
    k4 = np.empty(13)
    _quad_deriv(s, f, qp, k1)
    _quad_deriv(s + 0.5 * dt * k1, f, qp, k2)
    _quad_deriv(s + 0.5 * dt * k2, f, qp, k3)
    _quad_deriv(s + dt * k3, f, qp, k4)
    out = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    qn = math.sqrt(out[3] ** 2 + out[4] ** 2 + out[5] ** 2 + out[6] ** 2)
    out[3:7] /= qn
    return out


def propagate_phases(state, phases, dt_int, qp, w_max):
    """Integrate a piecewise-constant motor schedule on a uniform grid.

    `phases` is (k, 5): [duration, f1, f2, f3, f4].  The total duration must
    be a whole multiple of dt_int (callers round the drawn duration up).
    Integration sub-steps split at phase boundaries so each RK4 step sees a
    single motor command; recorded rows are the uniform grid points.

    Returns (states (n+1, 13), ok).  ok=False means a body-rate bound was
    crossed; rows up to and including the offending state are valid.
    """
    total = 0.0
    k = phases.shape[0]
    for j in range(k):
        total += phases[j, 0]
    n = int(round(total / dt_int))
    out = np.empty((n + 1, 13))
    s = np.array(state, dtype=float)
    out[0] = s
    w_cap = w_max * (1.0 + 1e-9)

    phase = 0
    left = phases[0, 0] if k > 0 else 0.0
    for i in range(n):
        remaining = dt_int
        while remaining > 1e-15:
            while left <= 1e-15 and phase < k - 1:
                phase += 1
                left = phases[phase, 0]
            h = min(remaining, left) if phase < k - 1 else remaining
            if h <= 1e-15:
                h = remaining
            s = rk4_step_arr(s, phases[phase, 1:5], h, qp)
            if (
                abs(s[10]) > w_cap
                or abs(s[11]) > w_cap
                or abs(s[12]) > w_cap
            ):
                out[i + 1] = s
                return out[: i + 2], False
            remaining -= h
            left -= h
        out[i + 1] = s
    return out, True


# ---------------------------------------------------------------------------
# Weighted state metric and reference lookups
# ---------------------------------------------------------------------------


def metric_dist(a, b, sp2, sq2, sv2, sw2):
    """Weighted state distance; the attitude term is the geodesic angle."""
    dp = (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2
    dot = a[3] * b[3] + a[4] * b[4] + a[5] * b[5] + a[6] * b[6]
    ang = 2.0 * math.acos(min(1.0, abs(dot)))
    dv = (a[7] - b[7]) ** 2 + (a[8] - b[8]) ** 2 + (a[9] - b[9]) ** 2
    dw = (a[10] - b[10]) ** 2 + (a[11] - b[11]) ** 2 + (a[12] - b[12]) ** 2
    return math.sqrt(dp / sp2 + ang * ang / sq2 + dv / sv2 + dw / sw2)


def ref_nearest_pos(ref_pos, x, y, z):
    """Nearest row of (m, 3) positions; ties resolve to the earliest row."""
    d2 = (ref_pos[:, 0] - x) ** 2 + (ref_pos[:, 1] - y) ** 2 + (ref_pos[:, 2] - z) ** 2
    i = int(np.argmin(d2))
    return i, math.sqrt(float(d2[i]))


def ref_nearest_state(ref, sp2, sq2, sv2, sw2, s):
    """Nearest row of (m, 13) states in the weighted metric (earliest tie)."""
    dp = np.sum((ref[:, 0:3] - s[0:3]) ** 2, axis=1)
    dot = np.abs(ref[:, 3:7] @ s[3:7])
    ang = 2.0 * np.arccos(np.minimum(1.0, dot))
    dv = np.sum((ref[:, 7:10] - s[7:10]) ** 2, axis=1)
    dw = np.sum((ref[:, 10:13] - s[10:13]) ** 2, axis=1)
    d2 = dp / sp2 + ang * ang / sq2 + dv / sv2 + dw / sw2
    return int(np.argmin(d2))


# ---------------------------------------------------------------------------
# State index (brute force twin of the native grid hash)
# ---------------------------------------------------------------------------


class StateIndex:
    """Dynamic set of 13-dim states supporting weighted-metric queries.

    The native backend bins by position; this twin stores rows densely and
    scans with numpy.  Ids are caller-assigned, nonnegative, and unique among
    live entries.
    """

    def __init__(self, cell, lo, hi, sp2, sq2, sv2, sw2):
        self.sp2 = sp2
        self.sq2 = sq2
        self.sv2 = sv2
        self.sw2 = sw2
        self._states = np.empty((64, 13))
        self._ids = np.empty(64, dtype=np.int64)
        self._n = 0
        self._slot_of = {}

    def __len__(self):
        return len(self._slot_of)

    def insert(self, idx, state):
        if self._n == self._states.shape[0]:
            self._states = np.concatenate([self._states, np.empty_like(self._states)])
            self._ids = np.concatenate([self._ids, np.empty_like(self._ids)])
        self._states[self._n] = state
        self._ids[self._n] = idx
        self._slot_of[idx] = self._n
        self._n += 1

    def remove(self, idx):
        slot = self._slot_of.pop(idx)
        last = self._n - 1
        if slot != last:
            self._states[slot] = self._states[last]
            moved = int(self._ids[last])
            self._ids[slot] = moved
            self._slot_of[moved] = slot
        self._n = last

    def _dists(self, s):
        r = self._states[: self._n]
        dp = np.sum((r[:, 0:3] - s[0:3]) ** 2, axis=1)
        dot = np.abs(r[:, 3:7] @ s[3:7])
        ang = 2.0 * np.arccos(np.minimum(1.0, dot))
        dv = np.sum((r[:, 7:10] - s[7:10]) ** 2, axis=1)
        dw = np.sum((r[:, 10:13] - s[10:13]) ** 2, axis=1)
        return np.sqrt(dp / self.sp2 + ang * ang / self.sq2 + dv / self.sv2 + dw / self.sw2)

    def nearest(self, s):
        """(id, dist) of the closest entry; (-1, inf) when empty.

        Ties resolve to the smallest id.
        """
        if self._n == 0:
            return -1, math.inf
        d = self._dists(s)
        dmin = float(np.min(d))
        ids = self._ids[: self._n][d == dmin]
        return int(np.min(ids)), dmin

    def radius_best_cost(self, s, radius, costs):
        """Min-cost id within `radius`; ties by id.  -1 when none."""
        if self._n == 0:
            return -1
        d = self._dists(s)
        mask = d <= radius
        if not np.any(mask):
            return -1
        ids = self._ids[: self._n][mask]
        c = costs[ids]
        best = np.min(c)
        return int(np.min(ids[c == best]))

    def ids_within_pos(self, x, y, z, radius):
        """Ids whose position lies within `radius` of (x, y, z), ascending."""
        if self._n == 0:
            return np.empty(0, dtype=np.int64)
        r = self._states[: self._n]
        d2 = (r[:, 0] - x) ** 2 + (r[:, 1] - y) ** 2 + (r[:, 2] - z) ** 2
        ids = self._ids[: self._n][d2 <= radius * radius]
        return np.sort(ids)
