"""Table builders behind the CLI subcommands."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import ConfigError, JobConfig
from .emit import SvgCanvas, Table
from .fermi_kms import correlator_closed, kms_residual
from .flow import TwoIntervalCone, boost_hyperbola, flow_circle_angle, flow_zeta, trace_orbit
from .geometry import TWO_PI, CircleArc, root_arcs
from .mixing import mixing_angle_n2, mixing_ode_series
from .thermo import BoostProfile, ThermoField, beta_of_proper_time, charge_split_points
from .uniformization import invert, preimages


MAX_ODE_STEPS = 5e7


@dataclass
class CommandResult:
    tables: dict[str, Table]
    svg: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def main(self) -> Table:
        return next(iter(self.tables.values()))


def _cone(cfg: JobConfig) -> TwoIntervalCone:
    if cfg.E.n != 2:
        raise ConfigError(f"this command needs exactly two intervals, got {cfg.E.n}")
    try:
        return TwoIntervalCone.from_ninterval(cfg.E)
    except ValueError as exc:
        raise ConfigError(f"intervals do not form a valid double cone: {exc}") from exc


def _grid(g: dict, lo: str, hi: str, pts: str) -> np.ndarray:
    return np.linspace(g[lo], g[hi], g[pts])


def seed_points(E, per_component: int) -> np.ndarray:
    """Seeds with zeta values spread over [-1, 1]; shape (per_component, n)."""
    zs = np.zeros(1) if per_component == 1 else np.linspace(-1.0, 1.0, per_component)
    return np.atleast_2d(preimages(E, zs))


# ---------------------------------------------------------------------------


def cmd_flow(cfg: JobConfig) -> CommandResult:
    g = cfg.grid("flow")
    ts = _grid(g, "t_min", "t_max", "t_points")
    seeds = seed_points(cfg.E, g["seeds_per_component"])
    table = Table(["t", "component", "x"])
    n = cfg.E.n
    for t in ts:
        flowed = flow_zeta(cfg.E, t, seeds)
        for k in range(n):
            for m in range(seeds.shape[0]):
                table.add(float(t), k, float(flowed[m, k]))
    return CommandResult({"flow": table})


def _u_diag(cone: TwoIntervalCone, v):
    # line through the tips (a1, a2) and (b1, b2) in lightray coordinates
    return cone.a1 + (v - cone.a2) * (cone.b1 - cone.a1) / (cone.b2 - cone.a2)


def orbit_table(cone: TwoIntervalCone, start, s_grid, zoom: float) -> Table:
    table = Table(["s", "u", "v", "invariant", "u_zoom"])
    for smp in trace_orbit(cone, start, s_grid):
        ud = _u_diag(cone, smp.v)
        table.add(smp.s, smp.u, smp.v, smp.invariant_value, zoom * (smp.u - ud) + ud)
    return table


def _cone_canvas(cone: TwoIntervalCone, pad: float = 0.1) -> SvgCanvas:
    pts = cone.outline()
    xs = [p[1] for p in pts] + [0.0]
    ts = [p[0] for p in pts]
    span = max(max(xs) - min(xs), max(ts) - min(ts))
    cx, ct = 0.5 * (max(xs) + min(xs)), 0.5 * (max(ts) + min(ts))
    half = 0.5 * span * (1 + pad)
    return SvgCanvas((cx - half, cx + half), (ct - half, ct + half))


def _outline_xt(cone: TwoIntervalCone):
    pts = cone.outline()
    return [(x, t) for t, x in pts]


def cmd_orbit(cfg: JobConfig) -> CommandResult:
    cone = _cone(cfg)
    g = cfg.grid("orbit")
    start = tuple(g["start"]) if g["start"] is not None else cone.center
    if not cone.contains(*start):
        raise ConfigError(f"orbit start {start} is not inside the double cone")
    table = orbit_table(cone, start, _grid(g, "s_min", "s_max", "s_points"), g["zoom"])
    canvas = _cone_canvas(cone)
    canvas.polygon(_outline_xt(cone))
    canvas.polyline([(0.5 * (r[1] - r[2]), 0.5 * (r[1] + r[2])) for r in table.rows], "blue")
    canvas.polyline([(0.5 * (r[4] - r[2]), 0.5 * (r[4] + r[2])) for r in table.rows], "red",
                    cls="zoomed")
    return CommandResult({"orbit": table}, canvas.to_string())


def cmd_mixing(cfg: JobConfig) -> CommandResult:
    g = cfg.grid("mixing")
    ts = _grid(g, "t_min", "t_max", "t_points")
    if max(abs(ts[0]), abs(ts[-1])) * g["steps_per_unit"] > MAX_ODE_STEPS:
        raise ConfigError(f"mixing grid needs more than {MAX_ODE_STEPS:.0e} ODE steps")
    E = cfg.E
    n = E.n
    x0 = g["x0"]
    if x0 is None:
        x0 = float(invert(E, [0.0], [n - 1])[0])
    elif E.component_of(x0) is None:
        raise ConfigError("'grids.mixing.x0' is not inside the intervals")
    mats, _ = mixing_ode_series(E, ts, g["steps_per_unit"], x0)
    cols = ["t"] + [f"O_{j}{k}" for j in range(n) for k in range(n)] + ["defect", "theta"]
    table = Table(cols)
    cone = TwoIntervalCone.from_ninterval(E) if n == 2 else None
    for t, m in zip(ts, mats):
        theta = mixing_angle_n2(cone, float(t), x0) if cone is not None else None
        table.add(float(t), *[float(v) for v in m.entries.ravel()], m.defect, theta)
    return CommandResult({"mixing": table})


def cmd_thermo(cfg: JobConfig) -> CommandResult:
    cone = _cone(cfg)
    g = cfg.grid("thermo")
    field_ = ThermoField(cone, g["u_points"], g["v_points"]).evaluate()
    grid = Table(["t", "x", "beta", "kappa", "beta_kappa"])
    for idx in np.ndindex(field_["t"].shape):
        grid.add(*(float(field_[k][idx]) for k in ("t", "x", "beta", "kappa", "beta_kappa")))
    tables = {"thermo": grid}
    boost = Table(["tau", "beta_tau"])
    if cone.is_symmetric and cone.a1 < 1.0 < cone.b1:
        prof = BoostProfile.from_cone(cone)
        taus = np.linspace(prof.tau_min, prof.tau_max, g["tau_points"])
        for tau, b in zip(taus, beta_of_proper_time(prof, taus)):
            boost.add(float(tau), float(b))
    tables["boost"] = boost
    return CommandResult(tables)


def cmd_kms(cfg: JobConfig) -> CommandResult:
    E = cfg.E
    if cfg.symmetric is None:
        raise ConfigError("the KMS check needs a symmetric n-interval")
    g = cfg.grid("kms")
    rng = np.random.default_rng(g["seed"])
    n = E.n
    eps = cfg.epsilon
    table = Table(["x", "y", "i", "j", "epsilon", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                   "residual"])
    for _ in range(g["pairs"]):
        zx, zy = rng.uniform(-g["zeta_range"], g["zeta_range"], 2)
        kx, ky = rng.integers(n), rng.integers(n)
        x = float(invert(E, [zx], [kx])[0])
        y = float(invert(E, [zy], [ky])[0])
        lhs = correlator_closed(E, x, y, 0.0, -0.5j, eps)
        rhs = correlator_closed(E, y, x, 0.0, -0.5j, eps)
        table.add(x, y, lhs.i, lhs.j, eps, lhs.value.real, lhs.value.imag,
                  rhs.value.real, rhs.value.imag, kms_residual(E, x, y, eps))
    return CommandResult({"kms": table})


# ---------------------------------------------------------------------------
# figures


def cmd_fig1(cfg: JobConfig) -> CommandResult:
    """Circle flow in the n-th root of an arc and of its complement."""
    g = cfg.grid("fig1")
    n = g["n"]
    arc = CircleArc(*g["arc"])
    comp = CircleArc(arc.end, arc.start)
    ts = _grid(g, "t_min", "t_max", "t_points")
    m = g["seeds_per_component"]
    table = Table(["region", "t", "component", "seed", "angle"])
    canvas = SvgCanvas((-1.25, 1.25), (-1.25, 1.25))
    circle = [(math.cos(a), math.sin(a)) for a in np.linspace(0, TWO_PI, 181)]
    canvas.polyline(circle, "gray", cls="circle")
    for name, base in (("E", arc), ("E'", comp)):
        arcs = root_arcs(base, n)
        for k, c in enumerate(arcs):
            seeds = [c.start + c.length * (q + 1) / (m + 1) for q in range(m)]
            pts = [(1.1 * math.cos(c.start + c.length * q / 40), 1.1 * math.sin(c.start + c.length * q / 40))
                   for q in range(41)]
            canvas.polyline(pts, "blue" if name == "E" else "green", 2.0, cls="component")
            for q, phi in enumerate(seeds):
                traj = []
                for t in ts:
                    ang = flow_circle_angle(base, n, float(t), phi)
                    table.add(name, float(t), k, q, ang)
                    traj.append(ang)
                r = 0.9 if name == "E" else 0.8
                canvas.polyline([(r * math.cos(a), r * math.sin(a)) for a in traj], "red",
                                cls="trajectory")
    return CommandResult({"fig1": table}, canvas.to_string())


def cmd_fig2(cfg: JobConfig) -> CommandResult:
    """Left: orbit of an off-centre point; right: zoomed orbit through the centre."""
    g = cfg.grid("fig2")
    try:
        cone = TwoIntervalCone.symmetric(g["a"], g["b"])
    except ValueError as exc:
        raise ConfigError(f"invalid fig2 cone: {exc}") from exc
    s = _grid(g, "s_min", "s_max", "s_points")
    if g["start"] is not None:
        left = tuple(g["start"])
    else:
        u = cone.a1 + 0.3 * (cone.b1 - cone.a1)
        v = cone.a2 + 0.6 * (cone.b2 - cone.a2)
        left = (0.5 * (u + v), 0.5 * (u - v))
    if not cone.contains(*left):
        raise ConfigError("fig2 start point is not inside the cone")
    table = Table(["panel", "s", "u", "v", "invariant", "u_zoom"])
    zoom = g["zoom"]
    for name, start, f in (("arbitrary", left, 1.0), ("center", cone.center, zoom)):
        for row in orbit_table(cone, start, s, f).rows:
            table.add(name, *row)
    canvas = _cone_canvas(cone)
    canvas.polygon(_outline_xt(cone))
    for name, colour, col in (("arbitrary", "blue", 2), ("center", "red", 5)):
        pts = [(0.5 * (r[col] - r[3]), 0.5 * (r[col] + r[3])) for r in table.rows if r[0] == name]
        canvas.polyline(pts, colour, cls=name)
    tips = [cone.past_tip, cone.future_tip]
    canvas.polyline([(x, t) for t, x in tips], "gray", cls="diagonal")
    return CommandResult({"fig2": table}, canvas.to_string(), {"zoom": zoom})


def cmd_fig3(cfg: JobConfig) -> CommandResult:
    """The six charge-splitting points of (u, v) with boundary flags."""
    g = cfg.grid("fig3")
    try:
        cone = TwoIntervalCone.symmetric(g["a"], g["b"])
    except ValueError as exc:
        raise ConfigError(f"invalid fig3 cone: {exc}") from exc
    u, v = g["u"], g["v"]
    if not (cone.a1 < u < cone.b1 and cone.a2 < v < cone.b2):
        raise ConfigError("fig3 point (u, v) must lie inside the cone")
    regions = charge_split_points(u, v, g["half_width"])
    table = Table(["label", "p", "q", "t", "x", "on_boundary"])
    for pt in regions:
        table.add(pt.label, pt.p, pt.q, 0.5 * (pt.p + pt.q), 0.5 * (pt.p - pt.q), pt.on_boundary)
    canvas = _cone_canvas(cone, pad=0.6)
    canvas.polygon(_outline_xt(cone))
    t0, rho = boost_hyperbola(cone)
    # boost orbit (u - t0)(v - t0) = -rho^2 inside the cone
    us = np.linspace(cone.a1, cone.b1, 101)
    vs = t0 - rho**2 / (us - t0)
    canvas.polyline([(0.5 * (a - b), 0.5 * (a + b)) for a, b in zip(us, vs)], "gray", cls="boost")
    for pt in regions:
        canvas.marker(0.5 * (pt.p - pt.q), 0.5 * (pt.p + pt.q))
    extra = {"cone": [cone.a1, cone.b1, cone.a2, cone.b2], "boost": [t0, rho]}
    return CommandResult({"fig3": table}, canvas.to_string(), extra)


COMMANDS = {
    "flow": cmd_flow,
    "orbit": cmd_orbit,
    "mixing": cmd_mixing,
    "thermo": cmd_thermo,
    "kms": cmd_kms,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
}
