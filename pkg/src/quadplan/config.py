"""Planner configuration: dataclasses plus a flat ``key = value`` file format.

Every knob has a default matching the reference platform (0.85 kg racing
quadrotor), so an empty config file is valid.  Keys are dotted with the
section name, e.g. ``sst.delta_bn = 1.3``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Raised for unknown keys, malformed lines, or out-of-range values."""


@dataclass
class QuadParams:
    """Rigid-body and actuator limits."""

    m: float = 0.85          # mass [kg]
    l: float = 0.15          # arm length [m], X configuration
    jx: float = 1.0e-3       # inertia diagonal [kg m^2]
    jy: float = 1.0e-3
    jz: float = 1.7e-3
    kappa: float = 0.05      # rotor drag torque coefficient [m]
    f_min: float = 0.0       # per-motor thrust bounds [N]
    f_max: float = 7.0
    w_max: float = 15.0      # per-axis body rate bound [rad/s]
    g: float = 9.81          # gravity magnitude [m/s^2]

    @property
    def g_vec(self):
        return (0.0, 0.0, -self.g)

    @property
    def a_max(self) -> float:
        """Collective thrust acceleration bound 4 f_max / m."""
        return 4.0 * self.f_max / self.m


@dataclass
class EsdfParams:
    d_sat: float = 2.0       # distance saturation [m]


@dataclass
class TopoParams:
    k_near: int = 12         # roadmap out-degree
    n0: int = 300            # initial sample count per segment
    n_growth: float = 1.5
    l0_factor: float = 1.2   # initial ellipsoid major axis = factor * c
    l_growth: float = 1.3
    max_rounds: int = 8
    max_depth: int = 3       # distinct-path recursion depth
    max_paths: int = 5       # kept per segment after filtering
    len_factor: float = 3.0  # keep paths within factor * shortest
    n_checks: int = 32       # discretization for homotopy comparison
    seg_step: float = 0.1    # collision sampling step along edges [m]
    max_raw: int = 64        # raw distinct paths cap before filtering


@dataclass
class PmmParams:
    a_max_scale: float = 1.0   # fraction of 4 f_max / m available to stage 2
    gd_max_iters: int = 200
    gd_step_tol: float = 1e-6  # relative step-size stopping threshold
    eps_v: float = 1e-3        # velocity search convergence [s]
    max_rounds: int = 30       # velocity refocusing rounds
    dt_cc: float = 0.01        # collision sampling step [s]
    max_insert: int = 8        # waypoint insertions per original segment


@dataclass
class GuideParams:
    dt_ref: float = 0.01       # reference state sampling step [s]
    omega_margin: float = 0.999  # fraction of w_max used by rotation arcs


@dataclass
class SstParams:
    delta_s: float = 0.5       # witness separation
    delta_bn: float = 1.3      # best-near selection radius
    sigma2_p: float = 1.3      # metric variances (position, attitude, ...)
    sigma2_q: float = 0.08
    sigma2_qrot: float = 0.013  # rotation axis perturbation variance
    sigma2_v: float = 8.3
    sigma2_w: float = 8.3
    s_rmin: float = 0.6        # per-phase duration scaling range
    s_rmax: float = 1.4
    t_min: float = 0.004       # propagation duration range [s]
    t_max: float = 1.2
    r_pmm: float = 1.05        # admissible cost ratio vs point-mass time
    delta_ref: float = 2.0     # admissible distance from the reference [m]
    p_g: float = 0.05          # goal-bias probability
    max_iters: int = 2_000_000
    stall_iters: int = 200_000
    dt_int: float = 1.0 / 300.0  # integration sub-step [s]


@dataclass
class RunParams:
    seed: int = 1
    d_c: float = 0.2           # collision clearance [m]
    r_tol: float = 0.3         # waypoint pass tolerance [m]
    dt_out: float = 0.01       # trajectory CSV resampling step [s]
    stop_after: int = 3        # run stages 1..stop_after


@dataclass
class PlannerConfig:
    quad: QuadParams = field(default_factory=QuadParams)
    esdf: EsdfParams = field(default_factory=EsdfParams)
    topo: TopoParams = field(default_factory=TopoParams)
    pmm: PmmParams = field(default_factory=PmmParams)
    guide: GuideParams = field(default_factory=GuideParams)
    sst: SstParams = field(default_factory=SstParams)
    run: RunParams = field(default_factory=RunParams)

    @property
    def a_max(self) -> float:
        return self.quad.a_max * self.pmm.a_max_scale

    def validate(self) -> None:
        q = self.quad
        if q.m <= 0 or q.f_max <= q.f_min or q.f_min < 0:
            raise ConfigError("quad: need m > 0 and 0 <= f_min < f_max")
        if min(q.jx, q.jy, q.jz) <= 0 or q.l <= 0 or q.w_max <= 0:
            raise ConfigError("quad: inertia, arm length, w_max must be positive")
        if not 0.0 < self.pmm.a_max_scale <= 1.0:
            raise ConfigError("pmm.a_max_scale must be in (0, 1]")
        if self.a_max <= q.g:
            raise ConfigError("thrust bound must exceed gravity")
        s = self.sst
        if s.t_min <= 0 or s.t_max < s.t_min:
            raise ConfigError("sst: need 0 < t_min <= t_max")
        if not 0 < s.s_rmin <= s.s_rmax:
            raise ConfigError("sst: need 0 < s_rmin <= s_rmax")
        if min(s.sigma2_p, s.sigma2_q, s.sigma2_v, s.sigma2_w) <= 0:
            raise ConfigError("sst: metric variances must be positive")
        if self.run.d_c < 0 or self.run.r_tol <= 0:
            raise ConfigError("run: need d_c >= 0 and r_tol > 0")
        if self.run.stop_after not in (1, 2, 3):
            raise ConfigError("run.stop_after must be 1, 2 or 3")
        if self.esdf.d_sat <= self.run.d_c:
            raise ConfigError("esdf.d_sat must exceed run.d_c")


_SECTIONS = {
    "quad": QuadParams,
    "esdf": EsdfParams,
    "topo": TopoParams,
    "pmm": PmmParams,
    "guide": GuideParams,
    "sst": SstParams,
    "run": RunParams,
}


def _coerce(cls, name: str, raw: str):
    ftypes = {f.name: f.type for f in dataclasses.fields(cls)}
    if name not in ftypes:
        raise ConfigError(f"unknown key '{name}' in section '{cls.__name__}'")
    want = ftypes[name]
    try:
        if want == "int":
            return int(raw)
        val = float(raw)
    except ValueError as e:
        raise ConfigError(f"bad value for {name}: {raw!r}") from e
    if not math.isfinite(val):
        raise ConfigError(f"non-finite value for {name}")
    return val


def parse_config(text: str) -> PlannerConfig:
    """Parse flat ``section.key = value`` lines into a PlannerConfig."""
    cfg = PlannerConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in body.split("=", 1))
        if "." not in key:
            raise ConfigError(f"line {lineno}: key '{key}' needs a section prefix")
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"line {lineno}: unknown section '{section}'")
        target = getattr(cfg, section)
        setattr(target, name, _coerce(_SECTIONS[section], name, raw))
    cfg.validate()
    return cfg


def load_config(path: str | Path | None) -> PlannerConfig:
    if path is None:
        cfg = PlannerConfig()
        cfg.validate()
        return cfg
    return parse_config(Path(path).read_text())


def dump_config(cfg: PlannerConfig) -> str:
    """Serialize every key; parse(dump(cfg)) reproduces cfg."""
    lines = []
    for section, cls in _SECTIONS.items():
        obj = getattr(cfg, section)
        for f in dataclasses.fields(cls):
            val = getattr(obj, f.name)
            rendered = repr(int(val)) if f.type == "int" else repr(float(val))
            lines.append(f"{section}.{f.name} = {rendered}")
    return "\n".join(lines) + "\n"
