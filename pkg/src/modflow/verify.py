"""The acceptance checks, runnable from the CLI and from pytest.

Every check returns one or more measurements. A measurement passes when
its residual is at most tolerance * factor, so tightening the factor
re-evaluates pass/fail without touching the residuals.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import build_config
from .errors import DegenerateCone
from .fermi_kms import (correlator_closed, correlator_mixed, kms_residual, lemma_identities,
                        single_interval_ratio, sl2_coefficients, sl2_partial_sums)
from .flow import TwoIntervalCone, flow_circle_symmetric, flow_zeta, trace_orbit, velocity_n2
from .geometry import TWO_PI, CircleArc, cayley, cayley_inv, symmetric_ninterval
from .mixing import mixing_angle_n2, mixing_closed_symmetric, mixing_ode, mixing_ode_series
from .thermo import (BoostProfile, ThermoField, beta_of_proper_time, energy_density,
                     energy_density_exact, h_nu_map, rotinv_t_derivative)
from .uniformization import invert, preimages, zeta_prime

BASE_ARC = CircleArc(0.3, 1.5)


@dataclass(frozen=True)
class Measurement:
    label: str
    residual: float
    tolerance: float

    def passed(self, factor: float = 1.0) -> bool:
        return bool(self.residual <= self.tolerance * factor)


@dataclass(frozen=True)
class CheckResult:
    name: str
    title: str
    measurements: tuple[Measurement, ...]
    factor: float = 1.0

    @property
    def passed(self) -> bool:
        return all(m.passed(self.factor) for m in self.measurements)

    @property
    def worst(self) -> Measurement:
        return max(self.measurements, key=lambda m: m.residual / m.tolerance if m.tolerance
                   else (math.inf if m.residual > 0 else 0.0))

    def summary(self) -> str:
        w = self.worst
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {w.label} residual={w.residual:.3e} tol={w.tolerance * self.factor:.1e}"

    def as_dict(self) -> dict:
        w = self.worst
        return {
            "passed": self.passed,
            "residual": w.residual,
            "tolerance": w.tolerance * self.factor,
            "parts": {m.label: {"passed": m.passed(self.factor), "residual": m.residual,
                                "tolerance": m.tolerance * self.factor}
                      for m in self.measurements},
        }


def _rng(name: str) -> np.random.Generator:
    return np.random.default_rng(zlib.crc32(name.encode()))


def random_cone(rng: np.random.Generator, span: float = 3.0, gap: float = 0.2) -> TwoIntervalCone:
    """Random a2 < b2 < a1 < b1 in [-span, span] with all gaps at least `gap`."""
    while True:
        e = np.sort(rng.uniform(-span, span, 4))
        if np.min(np.diff(e)) < gap:
            continue
        try:
            return TwoIntervalCone(e[2], e[3], e[0], e[1])
        except DegenerateCone:
            continue


def random_symmetric(rng: np.random.Generator, n: int):
    """A random base arc whose n-th root stays away from the point at infinity."""
    while True:
        start = rng.uniform(-math.pi + 0.1, math.pi - 0.6)
        end = rng.uniform(start + 0.4, min(math.pi - 0.1, start + 2.5))
        arc = CircleArc(start, end)
        try:
            E = symmetric_ninterval(arc, n)
        except ValueError:
            continue
        if all(math.isfinite(c.lo) and math.isfinite(c.hi) for c in E.components):
            return arc, E


def _random_point(rng, cone: TwoIntervalCone) -> tuple[float, float]:
    u = rng.uniform(cone.a1, cone.b1)
    v = rng.uniform(cone.a2, cone.b2)
    return 0.5 * (u + v), 0.5 * (u - v)


# ---------------------------------------------------------------------------
# checks


def check_flow_equivalence(rng) -> list[Measurement]:
    out = []
    for n in (2, 3, 4):
        E = symmetric_ninterval(BASE_ARC, n)
        per = math.ceil(100 / n)
        # grid uniform in angle, strictly inside every component
        xs = np.concatenate([np.tan(np.linspace(2 * math.atan(c.lo), 2 * math.atan(c.hi),
                                                per + 2)[1:-1] / 2) for c in E.components])
        err = 0.0
        for t in np.linspace(-2.0, 2.0, 21):
            a = flow_zeta(E, t, xs)
            b = np.array([cayley_inv(flow_circle_symmetric(BASE_ARC, n, t, cayley(x))) for x in xs])
            err = max(err, float(np.max(np.abs(a - b))))
        out.append(Measurement(f"n={n}", err, 1e-10))
    return out


def check_mixing(rng) -> list[Measurement]:
    out = []
    ts = np.linspace(-2.0, 2.0, 21)
    for n in (2, 3, 4):
        E = symmetric_ninterval(BASE_ARC, n)
        mats, defect = mixing_ode_series(E, ts, track_defect=True)
        dist = max(float(np.linalg.norm(m.entries - mixing_closed_symmetric(BASE_ARC, n, t).entries))
                   for m, t in zip(mats, ts))
        out.append(Measurement(f"n={n} frobenius", dist, 1e-8))
        out.append(Measurement(f"n={n} defect", defect, 1e-9))
    return out


def check_angle_n2(rng) -> list[Measurement]:
    err = 0.0
    for _ in range(5):
        cone = random_cone(rng)
        x0 = float(preimages(cone.ninterval, rng.uniform(-1, 1))[rng.integers(2)])
        for t in (-0.5, 0.3, 1.0):
            ode = mixing_ode(cone.ninterval, t, x=x0).rotation_angle
            err = max(err, abs(ode - mixing_angle_n2(cone, t, x0)))
    return [Measurement("5 cones", err, 1e-8)]


def check_orbit_invariant(rng) -> list[Measurement]:
    s = np.linspace(-1.0, 1.0, 101)
    worst = 0.0
    for _ in range(20):
        cone = random_cone(rng)
        samples = trace_orbit(cone, _random_point(rng, cone), s)
        inv = np.array([q.invariant_value for q in samples])
        worst = max(worst, float(np.max(np.abs(inv / inv[50] - 1.0))))
    return [Measurement("20 starts", worst, 1e-8)]


def check_orbit_ode(rng, h: float = 1e-5) -> list[Measurement]:
    s = np.linspace(-1.0, 1.0, 41)
    worst = 0.0
    for _ in range(5):
        cone = random_cone(rng)
        start = _random_point(rng, cone)
        mid, up, dn = (trace_orbit(cone, start, s + d) for d in (0.0, h, -h))
        for m, p, q in zip(mid, up, dn):
            for comp in ("u", "v"):
                fd = (getattr(p, comp) - getattr(q, comp)) / (2 * h)
                exact = -TWO_PI * velocity_n2(cone, getattr(m, comp))
                worst = max(worst, abs(fd - exact) / abs(exact))
    return [Measurement("du/ds", worst, 1e-6)]


def check_velocity_uniformizer(rng) -> list[Measurement]:
    worst = 0.0
    for _ in range(5):
        cone = random_cone(rng)
        for lo, hi in ((cone.a1, cone.b1), (cone.a2, cone.b2)):
            u = np.linspace(lo, hi, 103)[1:-1]
            prod = velocity_n2(cone, u) * zeta_prime(cone.ninterval, u)
            worst = max(worst, float(np.max(np.abs(prod - 1.0))))
    return [Measurement("V zeta' - 1", worst, 1e-10)]


def _random_pair(rng, E, n, zr=3.0):
    zx, zy = rng.uniform(-zr, zr, 2)
    x = float(invert(E, [zx], [rng.integers(n)])[0])
    y = float(invert(E, [zy], [rng.integers(n)])[0])
    return x, y, zx, zy


def check_kms(rng) -> list[Measurement]:
    out = []
    for n in (1, 2, 3):
        _, E = random_symmetric(rng, n)
        for eps in (1e-3, 1e-6):
            worst = 0.0
            for _ in range(100):
                x, y, zx, zy = _random_pair(rng, E, n)
                if abs(zx - zy) < 1e-3:
                    continue
                worst = max(worst, kms_residual(E, x, y, eps))
            out.append(Measurement(f"n={n} eps={eps:g}", worst, 1e-10))
    return out


def check_correlators(rng) -> list[Measurement]:
    out = []
    for n in (2, 3):
        _, E = random_symmetric(rng, n)
        diff = ratio = 0.0
        done = 0
        while done < 200:
            x, y, zx, zy = _random_pair(rng, E, n)
            t, s = rng.uniform(-1, 1, 2)
            # keep away from coincident flowed points, where both forms blow up
            if abs((zx - TWO_PI * t) - (zy - TWO_PI * s)) < 0.05 or abs(zx - zy) < 0.05:
                continue
            a = correlator_mixed(E, x, y, t, s, 0.0).value
            b = correlator_closed(E, x, y, t, s, 0.0).value
            diff = max(diff, abs(a - b) / abs(b))
            r0 = single_interval_ratio(E, x, y, 0.0, 0.0)
            r1 = single_interval_ratio(E, x, y, t, s)
            ratio = max(ratio, abs(r1 - r0) / abs(r0))
            done += 1
        out.append(Measurement(f"n={n} mixed vs closed", diff, 1e-10))
        out.append(Measurement(f"n={n} ratio", ratio, 1e-9))
    return out


def check_trig(rng) -> list[Measurement]:
    # grid offset so that no angle hits a zero of sin(n a) or sin_k
    a = np.linspace(0.013, 3.1, 100) + 0.001 * math.sqrt(2)
    r1 = r2 = r3 = 0.0
    for n in range(1, 9):
        for j in range(n):
            x1, x2, x3 = lemma_identities(n, a[:, None], a[None, :], j)
            r1, r2, r3 = max(r1, float(np.max(x1))), max(r2, x2), max(r3, float(np.max(x3)))
    return [Measurement("product", r1, 1e-10), Measurement("cotangent sum", r2, 1e-10),
            Measurement("exponential sum", r3, 1e-10)]


def check_unruh(rng) -> list[Measurement]:
    cone = TwoIntervalCone.symmetric(0.5, 2.0)
    bk = ThermoField(cone, 200, 200).evaluate()["beta_kappa"]
    top = float(np.max(bk))
    prof = BoostProfile.from_symmetric(0.5, 2.0)
    tau = np.linspace(prof.tau_min, prof.tau_max, 201)
    et = np.exp(tau)
    ref = TWO_PI * np.abs(velocity_n2(cone, et) / et)
    sup = float(np.max(np.abs(beta_of_proper_time(prof, tau) - ref)))
    return [Measurement("max beta*kappa - 2pi", top - TWO_PI, 1e-6),
            Measurement("2pi - max beta*kappa", TWO_PI - top, 1e-2),
            Measurement("beta(tau)", sup, 1e-10)]


def check_energy_density(rng) -> list[Measurement]:
    ys = np.linspace(-0.6, 0.6, 41)
    err = max(abs(energy_density(y) - energy_density_exact(y)) for y in ys)
    return [Measurement("c=1", float(err), 1e-8)]


def check_nu_family(rng) -> list[Measurement]:
    arc = CircleArc(0.2, 1.4)
    zs = np.exp(1j * np.linspace(0.25, 1.35, 20))
    out = []
    for nu in (0.5, 1.0, 2.0):
        h = h_nu_map(arc, nu)
        sch = max(abs(z * z * h.schwarzian(z) - (1 - nu * nu) / 2) for z in zs)
        drift = max(abs(rotinv_t_derivative(h, zs[i], zs[j], t))
                    for i, j in ((2, 9), (5, 17), (11, 14)) for t in (0.0, 0.05))
        out.append(Measurement(f"nu={nu:g} schwarzian", float(sch), 1e-8))
        out.append(Measurement(f"nu={nu:g} rotation", float(drift), 1e-6))
    return out


def check_sl2(rng) -> list[Measurement]:
    c = sl2_coefficients(1.0, 10_000)
    k = np.arange(c[::2].size)
    err = float(np.max(np.abs(c[::2] ** 2 - 1.0 / (2 * k + 1))))
    S = sl2_partial_sums(1.0, 10_000)
    return [Measurement("closed form", err, 1e-12),
            Measurement("|S ratio - 2|", float(abs(S[10_000] / S[100] - 2.0)), 0.5)]


def check_figures(rng) -> list[Measurement]:
    from .commands import cmd_fig1, cmd_fig2, cmd_fig3

    cfg = build_config()
    mismatch = 0
    for cmd in (cmd_fig1, cmd_fig2, cmd_fig3):
        a, b = cmd(cfg), cmd(build_config())
        mismatch += int(a.main.to_csv() != b.main.to_csv() or a.svg != b.svg)
    fig2 = cmd_fig2(cfg)
    g = cfg.grid("fig2")
    cone = TwoIntervalCone.symmetric(g["a"], g["b"])
    # the tip-to-tip diagonal, written as u = u(v) through (a1, a2) and (b1, b2)
    slope = (cone.b1 - cone.a1) / (cone.b2 - cone.a2)
    err = 0.0
    for panel, s, u, v, inv, uz in fig2.main.rows:
        f = 100.0 if panel == "center" else 1.0
        ud = cone.a1 + slope * (v - cone.a2)
        err = max(err, abs(uz - (f * (u - ud) + ud)) / max(1.0, abs(uz)))
    return [Measurement("determinism", float(mismatch), 0.0),
            Measurement("zoom f=100", err + abs(g["zoom"] - 100.0), 1e-12)]


CHECKS: dict[str, tuple[str, Callable[[np.random.Generator], list[Measurement]]]] = {
    "flow_equivalence": ("zeta flow equals the conjugated circle flow", check_flow_equivalence),
    "mixing_closed_vs_ode": ("mixing matrix closed form vs ODE", check_mixing),
    "two_interval_angle": ("n=2 mixing angle vs ODE", check_angle_n2),
    "orbit_invariant": ("orbit invariant drift", check_orbit_invariant),
    "orbit_ode": ("closed-form orbit solves du/ds = -2 pi V", check_orbit_ode),
    "velocity_uniformizer": ("V zeta' = 1", check_velocity_uniformizer),
    "kms": ("KMS condition of the closed correlator", check_kms),
    "correlator_forms": ("mixed vs closed correlator", check_correlators),
    "trig_identities": ("trigonometric identities", check_trig),
    "unruh_bound": ("beta*kappa bound and boost profile", check_unruh),
    "energy_density": ("energy density via the Schwarzian", check_energy_density),
    "nu_family": ("nu-family Schwarzian and rotation invariance", check_nu_family),
    "sl2_recursion": ("sl(2) ladder recursion", check_sl2),
    "figures": ("figure tables", check_figures),
}


def run_check(name: str, tolerance_factor: float = 1.0) -> CheckResult:
    title, fn = CHECKS[name]
    return CheckResult(name, title, tuple(fn(_rng(name))), tolerance_factor)


def run_checks(names=None, tolerance_factor: float = 1.0) -> list[CheckResult]:
    names = list(CHECKS) if names is None else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    return [run_check(n, tolerance_factor) for n in names]


def report(results: list[CheckResult]) -> dict:
    return {r.name: r.as_dict() for r in results}
