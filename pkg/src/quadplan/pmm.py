"""Point-mass minimum-time primitives between boundary states.

A primitive fixes one thrust vector a_t with ||a_t|| equal to the point-mass
acceleration bound; each axis then runs a two-phase profile with constant
accelerations a_t_i + g_i and -a_t_i + g_i.  The thrust direction is
optimized by projected gradient descent on the sphere, after which the two
faster axes are stretched to the duration of the slowest one by lowering
their per-axis thrust magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K

GRAVITY = 9.81


@dataclass
class PmState:
    """Point-mass boundary state."""

    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float).copy()
        self.v = np.asarray(self.v, dtype=float).copy()


@dataclass
class AxisSolution:
    """Two-phase profile on one axis: accel a1 for t1, then a2 until T."""

    a1: float
    a2: float
    t1: float
    T: float
    feasible: bool = True


@dataclass
class PmmPrimitive:
    start: PmState
    end: PmState
    a_t: np.ndarray                 # optimized thrust vector, ||a_t|| = a_max
    T: float                        # synchronized duration
    axes: list[AxisSolution] = field(default_factory=list)
    converged: bool = True

    def sample(self, t: float):
        return sample_primitive(self, t)


def solve_axis(p_s: float, v_s: float, p_e: float, v_e: float,
               a_plus: float, a_minus: float) -> AxisSolution:
    """Minimum-time two-phase profile with accelerations +a_plus / -a_minus.

    Both phase orderings are considered; an infeasible pair returns a marker
    with T = inf (consumed as +inf cost by the direction optimizer).
    """
    if a_plus < 0 or a_minus < 0:
        raise ValueError("acceleration magnitudes must be nonnegative")
    T, t1, a1, a2 = K.axis_fastest(p_s, v_s, p_e, v_e, a_plus, -a_minus)
    if math.isinf(T):
        return AxisSolution(a1=a_plus, a2=-a_minus, t1=0.0, T=math.inf, feasible=False)
    return AxisSolution(a1=a1, a2=a2, t1=t1, T=T)


def stretch_axis(sol: AxisSolution, p_s: float, v_s: float, p_e: float, v_e: float,
                 T_target: float) -> AxisSolution:
    """Re-time one axis to exactly T_target >= sol.T.

    The drift acceleration g = (a1 + a2) / 2 is preserved and the per-axis
    thrust magnitude b = (a1 - a2) / 2 is lowered; the switch time follows in
    closed form.  Candidates needing more thrust than before are rejected.
    """
    if not sol.feasible:
        raise ValueError("cannot stretch an infeasible axis solution")
    if T_target < sol.T - 1e-9:
        raise ValueError(f"T_target {T_target} below minimal duration {sol.T}")
    g = 0.5 * (sol.a1 + sol.a2)
    b_orig = abs(sol.a1 - g)
    sigma_pref = 1.0 if sol.a1 - g >= 0.0 else -1.0
    ok, b, t1, sigma = K.axis_stretch(p_s, v_s, p_e, v_e, g, sigma_pref,
                                      b_orig, T_target)
    if not ok:
        return AxisSolution(a1=sol.a1, a2=sol.a2, t1=sol.t1, T=math.inf, feasible=False)
    return AxisSolution(a1=sigma * b + g, a2=-sigma * b + g, t1=t1, T=T_target)


def solve_primitive(start: PmState, end: PmState, a_max: float,
                    g_vec=(0.0, 0.0, -GRAVITY),
                    max_iters: int = 200, step_tol: float = 1e-6,
                    trace: np.ndarray | None = None) -> PmmPrimitive:
    """Near minimum-time point-mass connection between two states.

    Returns a primitive with T = inf when no feasible thrust direction was
    found (the boundary pair is then unreachable under the bound a_max).
    """
    ps = np.asarray(start.p, dtype=float)
    vs = np.asarray(start.v, dtype=float)
    pe = np.asarray(end.p, dtype=float)
    ve = np.asarray(end.v, dtype=float)
    gv = np.asarray(g_vec, dtype=float)

    if np.allclose(ps, pe, atol=1e-12) and np.allclose(vs, ve, atol=1e-12):
        axes = [AxisSolution(a1=0.0, a2=0.0, t1=0.0, T=0.0) for _ in range(3)]
        return PmmPrimitive(start, end, np.zeros(3), 0.0, axes)

    at, T, _, converged = K.pmm_gd(ps, vs, pe, ve, a_max, gv,
                                   max_iters, step_tol, trace)
    if math.isinf(T):
        return PmmPrimitive(start, end, np.zeros(3), math.inf, [], converged=False)

    # The time-optimal direction can be impossible to synchronize: a fast
    # axis may need more than its thrust share to burn the extra time (e.g.
    # holding altitude through a long horizontal cruise).  Tilting the
    # thrust toward the failing axis restores feasibility at a small time
    # cost, so try the optimum first and blend outward until all axes fit.
    lam = 0.25
    for _ in range(8):
        axes, fail_axis = _assemble_axes(ps, vs, pe, ve, at, gv)
        if fail_axis < 0:
            return PmmPrimitive(start, end, at, axes[0].T, axes, converged=converged)
        tilt = np.zeros(3)
        tilt[fail_axis] = a_max if at[fail_axis] >= 0.0 else -a_max
        cand = at + lam * tilt
        cn = np.linalg.norm(cand)
        if cn < 1e-12:
            break
        at = cand * (a_max / cn)
        lam *= 2.0
    return PmmPrimitive(start, end, at, math.inf, [], converged=False)


def _assemble_axes(ps, vs, pe, ve, at, gv):
    """Per-axis solutions synchronized to the slowest axis.

    Returns (axes, -1) on success or (partial, failing_axis_index) when an
    axis cannot reach or cannot be stretched within its thrust share.
    """
    axes = []
    for i in range(3):
        Ti, t1, a1, a2 = K.axis_fastest(ps[i], vs[i], pe[i], ve[i],
                                        at[i] + gv[i], -at[i] + gv[i])
        if math.isinf(Ti):
            return axes, i
        axes.append(AxisSolution(a1=a1, a2=a2, t1=t1, T=Ti))
    T_sync = max(a.T for a in axes)
    out = []
    for i in range(3):
        if axes[i].T < T_sync - 1e-12:
            stretched = stretch_axis(axes[i], ps[i], vs[i], pe[i], ve[i], T_sync)
            if not stretched.feasible:
                return axes, i
            out.append(stretched)
        else:
            out.append(AxisSolution(axes[i].a1, axes[i].a2, axes[i].t1, T_sync))
    return out, -1


def sample_primitive(prim: PmmPrimitive, t: float):
    """Position, velocity and acceleration at time t in [0, T]."""
    if not prim.axes or math.isinf(prim.T):
        raise ValueError("cannot sample an infeasible primitive")
    if t < -1e-9 or t > prim.T + 1e-9:
        raise ValueError(f"t={t} outside [0, {prim.T}]")
    t = min(max(t, 0.0), prim.T)
    p = np.empty(3)
    v = np.empty(3)
    a = np.empty(3)
    for i in range(3):
        ax = prim.axes[i]
        ps, vs = prim.start.p[i], prim.start.v[i]
        if t <= ax.t1:
            p[i] = ps + vs * t + 0.5 * ax.a1 * t * t
            v[i] = vs + ax.a1 * t
            a[i] = ax.a1
        else:
            tau = t - ax.t1
            v1 = vs + ax.a1 * ax.t1
            p1 = ps + vs * ax.t1 + 0.5 * ax.a1 * ax.t1 * ax.t1
            p[i] = p1 + v1 * tau + 0.5 * ax.a2 * tau * tau
            v[i] = v1 + ax.a2 * tau
            a[i] = ax.a2
    return p, v, a
