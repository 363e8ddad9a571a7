"""Temperature and acceleration of the modular flow of a double cone,
the boost orbit, energy density, the nu-family of state maps and the
charge-splitting points."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivergentAcceleration, OutsideDomain, SingularDerivative
from .flow import TwoIntervalCone, partner_point, velocity_n2, velocity_n2_prime
from .geometry import (TWO_PI, CircleArc, MoebiusMap, schwarzian,
                       schwarzian_from_derivatives)

BETA_FLOOR = 1e-12


def _lightray(cone: TwoIntervalCone, t, x):
    t, x = np.asarray(t, float), np.asarray(x, float)
    u, v = t + x, t - x
    ok = (u >= cone.a1) & (u <= cone.b1) & (v >= cone.a2) & (v <= cone.b2)
    if not np.all(ok):
        raise OutsideDomain("point outside the closed double cone")
    return u, v


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def beta_field(cone: TwoIntervalCone, t, x):
    """beta = 2 pi sqrt(V(t+x) V(t-x)); zero on the boundary of the cone."""
    u, v = _lightray(cone, t, x)
    prod = np.maximum(velocity_n2(cone, u) * velocity_n2(cone, v), 0.0)
    return _out(TWO_PI * np.sqrt(prod))


def beta_kappa(cone: TwoIntervalCone, t, x):
    """beta * kappa = pi |V'(t+x) - V'(t-x)|, finite up to the boundary."""
    u, v = _lightray(cone, t, x)
    return _out(math.pi * np.abs(velocity_n2_prime(cone, u) - velocity_n2_prime(cone, v)))


def kappa_field(cone: TwoIntervalCone, t, x):
    """kappa = |V'(u) - V'(v)| / (beta / pi).

    Near the boundary beta -> 0 and kappa diverges; a DivergentAcceleration
    warning is issued and the computed value returned.
    """
    b = np.asarray(beta_field(cone, t, x))
    bk = np.asarray(beta_kappa(cone, t, x))
    if np.any(b < BETA_FLOOR):
        warnings.warn("acceleration evaluated where beta ~ 0", DivergentAcceleration, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _out(bk / b)


@dataclass(frozen=True)
class ThermoField:
    """beta, kappa and beta*kappa on an interior lightray grid of a cone.

    The grid takes nu x nv points strictly inside (a1, b1) x (a2, b2),
    equally spaced and excluding the endpoints.
    """

    cone: TwoIntervalCone
    nu: int = 50
    nv: int = 50

    def __post_init__(self):
        if self.nu < 2 or self.nv < 2:
            raise ValueError("grid resolution must be at least 2")

    def lightray_grid(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.cone
        u = np.linspace(c.a1, c.b1, self.nu + 2)[1:-1]
        v = np.linspace(c.a2, c.b2, self.nv + 2)[1:-1]
        return np.meshgrid(u, v, indexing="ij")

    def evaluate(self) -> dict[str, np.ndarray]:
        u, v = self.lightray_grid()
        t, x = 0.5 * (u + v), 0.5 * (u - v)
        beta = beta_field(self.cone, t, x)
        bk = beta_kappa(self.cone, t, x)
        return {"t": t, "x": x, "beta": beta, "kappa": bk / beta, "beta_kappa": bk}


def beta_kappa_zero_curve(cone: TwoIntervalCone, n_t: int = 50) -> list[tuple[float, float]]:
    """Points (t, x) where V'(t+x) = V'(t-x), one per time slice if present."""
    (tp, _), (tf, _) = cone.past_tip, cone.future_tip
    out = []
    for t in np.linspace(tp, tf, n_t + 2)[1:-1]:
        lo, hi = cone.x_range(t)
        f = lambda x: velocity_n2_prime(cone, t + x) - velocity_n2_prime(cone, t - x)
        xs = np.linspace(lo, hi, 65)[1:-1]
        vals = f(xs)
        sign = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
        if sign.size:
            i = sign[0]
            out.append((float(t), _bisect(f, xs[i], xs[i + 1])))
    return out


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-13) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# boost orbit


@dataclass(frozen=True)
class BoostProfile:
    tau_min: float
    tau_max: float

    def __post_init__(self):
        if not self.tau_min < self.tau_max:
            raise ValueError("need tau_min < tau_max")

    @classmethod
    def from_symmetric(cls, a: float, b: float) -> "BoostProfile":
        """Profile along u v = -1 for the cone (a, b) x (-1/a, -1/b), u_0 = 1."""
        if not 0 < a < 1 < b:
            raise ValueError("anchoring at u_0 = 1 needs a < 1 < b")
        return cls(math.log(a), math.log(b))

    @classmethod
    def from_cone(cls, cone: TwoIntervalCone) -> "BoostProfile":
        if not cone.is_symmetric:
            raise ValueError("closed boost profile only for symmetric cones")
        return cls.from_symmetric(cone.a1, cone.b1)


def beta_of_proper_time(profile: BoostProfile, tau):
    """beta(tau) = 2pi (sinh tmax - sinh tau)(sinh tau - sinh tmin) / ((sinh tmax - sinh tmin) cosh tau)."""
    ta = np.asarray(tau, float)
    if np.any(ta < profile.tau_min) or np.any(ta > profile.tau_max):
        raise OutsideDomain("proper time outside [tau_min, tau_max]")
    smax, smin = math.sinh(profile.tau_max), math.sinh(profile.tau_min)
    s = np.sinh(ta)
    out = TWO_PI * (smax - s) * (s - smin) / ((smax - smin) * np.cosh(ta))
    return _out(out)


def proper_time_along_boost(u_s, u_0):
    """tau = ln u_s - ln u_0 along u v = -1."""
    us, u0 = np.asarray(u_s, float), np.asarray(u_0, float)
    if np.any(us <= 0) or np.any(u0 <= 0):
        raise OutsideDomain("proper time along the boost needs positive u")
    return _out(np.log(us) - np.log(u0))


# ---------------------------------------------------------------------------
# energy density


def gamma_map(y):
    return 2.0 * y / (1.0 - y * y)


def energy_density(y: float, c: float = 1.0, h: float = 1e-3) -> float:
    """-(c / 24 pi) D_y gamma(y), gamma(y) = 2y/(1 - y^2), by a numeric Schwarzian."""
    if abs(abs(y) - 1.0) < 1e-9:
        raise SingularDerivative("gamma has a pole at y = +-1")
    # a plain callable, so the Schwarzian is taken numerically
    d = schwarzian(lambda z: gamma_map(z), float(y), h)
    return float(-c / (24.0 * math.pi) * d.real)


def energy_density_exact(y, c: float = 1.0):
    return -c / (4.0 * math.pi) * (1.0 + np.asarray(y, float) ** 2) ** -2


# ---------------------------------------------------------------------------
# nu-family


@dataclass(frozen=True)
class HNuMap:
    """h(z) = mu(z^nu), mu the Moebius map sending the image arc back onto I."""

    arc: CircleArc
    nu: float
    mu: MoebiusMap

    def __call__(self, z):
        return self.mu(complex(z) ** self.nu)

    def derivatives(self, z) -> tuple[complex, complex, complex]:
        nu, z = self.nu, complex(z)
        p = z**nu
        p1 = nu * z ** (nu - 1)
        p2 = nu * (nu - 1) * z ** (nu - 2)
        p3 = nu * (nu - 1) * (nu - 2) * z ** (nu - 3)
        m1, m2, m3 = self.mu.derivatives(p)
        return (m1 * p1, m2 * p1**2 + m1 * p2, m3 * p1**3 + 3 * m2 * p1 * p2 + m1 * p3)

    def schwarzian(self, z) -> complex:
        return schwarzian_from_derivatives(*self.derivatives(z))


def h_nu_map(I: CircleArc, nu: float) -> HNuMap:
    """z -> mu(z^nu), with mu fixing I's endpoints and midpoint."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    if nu * I.length >= TWO_PI:
        raise ValueError("nu * arc length must stay below 2 pi")
    if I.start > I.end:
        raise ValueError("arc must not contain the branch point -1")
    src = [cmath.exp(1j * nu * a) for a in (I.start, I.start + 0.5 * I.length, I.start + I.length)]
    return HNuMap(I, float(nu), MoebiusMap.from_points(src, I.points()))


def _rotinv_q(hmap, z: complex, w: complex, t: float, c: float) -> complex:
    rot = cmath.exp(1j * t)
    zr, wr = z * rot, w * rot
    hz, hw = hmap(zr), hmap(wr)
    dz = hmap.derivatives(zr)
    dw = hmap.derivatives(wr)
    hpz, hpw = dz[0] * rot, dw[0] * rot
    Dz = schwarzian_from_derivatives(*dz) * rot**2
    Dw = schwarzian_from_derivatives(*dw) * rot**2
    return 2.0 * c * (hpz * hpw / (hz - hw) ** 2) ** 2 + c * c / 36.0 * Dz * Dw


def rotinv_quantity(hmap, z: complex, w: complex, t: float = 0.0, c: float = 1.0) -> complex:
    """Q(z, w) for the rotated map h(e^{it} .), which must not depend on t."""
    return _rotinv_q(hmap, complex(z), complex(w), t, c)


def rotinv_t_derivative(hmap, z: complex, w: complex, t: float = 0.0, c: float = 1.0,
                        dt: float = 1e-4) -> complex:
    """Central difference of Q in t."""
    return (_rotinv_q(hmap, z, w, t + dt, c) - _rotinv_q(hmap, z, w, t - dt, c)) / (2 * dt)


# ---------------------------------------------------------------------------
# charge splitting


@dataclass(frozen=True)
class SplitPoint:
    label: str
    p: float
    q: float
    on_boundary: bool


@dataclass(frozen=True)
class SplitRegions:
    points: tuple[SplitPoint, ...]
    half_width: float = 0.0

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def by_label(self, label: str) -> SplitPoint:
        for pt in self.points:
            if pt.label == label:
                return pt
        raise KeyError(label)


def charge_split_points(u: float, v: float, half_width: float = 0.0,
                        cone: TwoIntervalCone | None = None,
                        tol: float = 1e-12) -> SplitRegions:
    """The six descending pairs from {u, u', v, v'}.

    u' = -1/u and v' = -1/v (symmetric cone); for a general cone the
    partner points are the other preimages of zeta.
    """
    if cone is None:
        if u == 0 or v == 0:
            raise OutsideDomain("partner of 0 is at infinity")
        up, vp = -1.0 / u, -1.0 / v
    else:
        up, vp = partner_point(cone, u), partner_point(cone, v)
    vals = {"u": u, "u'": up, "v": v, "v'": vp}
    # descending by value; exact ties keep the fixed order v', u, v, u'
    prio = {"v'": 0, "u": 1, "v": 2, "u'": 3}
    names = sorted(vals, key=lambda k: (-vals[k], prio[k]))
    pts = []
    for i in range(4):
        for j in range(i + 1, 4):
            a, b = names[i], names[j]
            p, q = vals[a], vals[b]
            pts.append(SplitPoint(f"({a},{b})", float(p), float(q),
                                  math.isclose(p, q, rel_tol=tol, abs_tol=tol)))
    pts.sort(key=lambda s: (-s.p, -s.q))
    return SplitRegions(tuple(pts), float(half_width))
