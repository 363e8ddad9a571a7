"""Geometric modular flows.

Three descriptions of the same flow are provided: the circle form for
symmetric n-intervals (a root of the dilation of the base arc), the zeta
form zeta -> zeta - 2 pi t for arbitrary n-intervals, and the lightray
form for a double cone in the half plane x > 0 built from two intervals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BranchError, DegenerateCone, OutsideDomain
from .geometry import (TWO_PI, CircleArc, NInterval, RealInterval, _chart_pair,
                       symmetric_ninterval, wrap_angle)
from .uniformization import (UniformizerContext, as_context, component_index,
                             invert, zeta, zeta_prime)

ENDPOINT_TOL = 1e-9


# ---------------------------------------------------------------------------
# circle form


def flow_circle_angle(I: CircleArc, n: int, t: float, phi: float,
                      tol: float = ENDPOINT_TOL) -> float:
    """Flow of the angle phi in the n-th root of I, returned in (-pi, pi]."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    L = I.length
    raw = n * wrap_angle(phi) - I.start
    off = raw % TWO_PI
    if not (n * tol < off < L - n * tol):
        raise BranchError(f"angle {phi} is not strictly inside a component of the {n}-th root")
    m = round((raw - off) / TWO_PI)
    if t == 0:
        return wrap_angle(phi)
    chart, chart_inv = _chart_pair(I)
    p = cmath.exp(1j * (I.start + off))
    y = chart_inv(p).real * math.exp(-TWO_PI * t)
    q = chart(complex(y))
    off_new = (cmath.phase(q) - I.start) % TWO_PI
    if off_new >= L:    # rounding right at an endpoint
        off_new = 0.0 if off_new > 0.5 * (L + TWO_PI) else L
    return wrap_angle((I.start + off_new + TWO_PI * m) / n)


def flow_circle_symmetric(I: CircleArc, n: int, t: float, z: complex,
                          tol: float = ENDPOINT_TOL) -> complex:
    """f_t(z) = (Lambda_I(-2 pi t)(z^n))^(1/n), with the root taken in z's component.

    Worked in angle space: the angle of z^n is moved along I, divided by n,
    and the component offset 2 pi k / n is added back.
    """
    return cmath.exp(1j * flow_circle_angle(I, n, t, cmath.phase(z), tol))


# ---------------------------------------------------------------------------
# zeta form


def flow_zeta(E, t, x):
    """x(t) = x_k(zeta(x) - 2 pi t) for x in component k (broadcasts over t, x)."""
    ctx = as_context(E)
    xa, ta = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    k = component_index(ctx, xa)
    z = zeta(ctx, xa) - TWO_PI * ta
    out = invert(ctx, np.ravel(z), np.ravel(k)).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def velocity_general(E, x):
    """dx/ds = -2 pi / zeta'(x)."""
    return -TWO_PI / zeta_prime(as_context(E), x)


@dataclass(frozen=True)
class FlowParams:
    """Either an n-interval E or a symmetric spec (arc, n), plus the parameter t."""

    E: NInterval | None = None
    arc: CircleArc | None = None
    n: int | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.E is None and (self.arc is None or self.n is None):
            raise ValueError("give an n-interval or a base arc with n")
        if self.E is None and self.n < 1:
            raise ValueError("n must be positive")

    @property
    def ninterval(self) -> NInterval:
        return self.E if self.E is not None else symmetric_ninterval(self.arc, self.n)

    def apply(self, x):
        return flow_zeta(self.ninterval, self.t, x)


# ---------------------------------------------------------------------------
# double cones


@dataclass(frozen=True)
class TwoIntervalCone:
    """Double cone u = t + x in (a1, b1), v = t - x in (a2, b2), with a2 < b2 < a1 < b1."""

    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        for name in ("a1", "b1", "a2", "b2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (self.a2 < self.b2 < self.a1 < self.b1):
            raise ValueError("cone endpoints must satisfy a2 < b2 < a1 < b1")
        if self.discriminant <= 0:
            raise DegenerateCone("LN - M^2 must be positive")

    @classmethod
    def symmetric(cls, a: float, b: float) -> "TwoIntervalCone":
        """The cone (a, b) x (-1/a, -1/b) for 0 < a < b."""
        if not 0 < a < b:
            raise ValueError("symmetric cone needs 0 < a < b")
        return cls(a, b, -1.0 / a, -1.0 / b)

    @classmethod
    def from_ninterval(cls, E: NInterval) -> "TwoIntervalCone":
        if E.n != 2:
            raise ValueError("a double cone needs exactly two intervals")
        (a2, b2), (a1, b1) = E.pairs()
        return cls(a1, b1, a2, b2)

    @property
    def L(self) -> float:
        return self.b1 - self.a1 + self.b2 - self.a2

    @property
    def M(self) -> float:
        return self.b1 * self.b2 - self.a1 * self.a2

    @property
    def N(self) -> float:
        return self.b2 * self.a2 * (self.b1 - self.a1) + self.b1 * self.a1 * (self.b2 - self.a2)

    @property
    def discriminant(self) -> float:
        return self.L * self.N - self.M**2

    @cached_property
    def ninterval(self) -> NInterval:
        return NInterval((RealInterval(self.a2, self.b2), RealInterval(self.a1, self.b1)))

    @cached_property
    def context(self) -> UniformizerContext:
        return UniformizerContext(self.ninterval)

    @property
    def is_symmetric(self) -> bool:
        return math.isclose(self.a2 * self.a1, -1.0, rel_tol=1e-12) and \
            math.isclose(self.b2 * self.b1, -1.0, rel_tol=1e-12)

    @property
    def past_tip(self) -> tuple[float, float]:
        return 0.5 * (self.a1 + self.a2), 0.5 * (self.a1 - self.a2)

    @property
    def future_tip(self) -> tuple[float, float]:
        return 0.5 * (self.b1 + self.b2), 0.5 * (self.b1 - self.b2)

    @property
    def center(self) -> tuple[float, float]:
        u, v = 0.5 * (self.a1 + self.b1), 0.5 * (self.a2 + self.b2)
        return 0.5 * (u + v), 0.5 * (u - v)

    def outline(self) -> list[tuple[float, float]]:
        """Corners (t, x) in the order past tip, right, future tip, left."""
        corners = [(self.a1, self.a2), (self.b1, self.a2), (self.b1, self.b2), (self.a1, self.b2)]
        return [(0.5 * (u + v), 0.5 * (u - v)) for u, v in corners]

    def contains(self, t: float, x: float) -> bool:
        u, v = t + x, t - x
        return self.a1 < u < self.b1 and self.a2 < v < self.b2

    def x_range(self, t: float) -> tuple[float, float]:
        """Closed x-extent of the constant-t slice."""
        return max(self.a1 - t, t - self.b2), min(self.b1 - t, t - self.a2)


def _check_closed(cone: TwoIntervalCone, u: np.ndarray) -> None:
    ok = ((u >= cone.a1) & (u <= cone.b1)) | ((u >= cone.a2) & (u <= cone.b2))
    if not np.all(ok):
        raise OutsideDomain(f"u outside both intervals of the cone: {np.atleast_1d(u)[~np.atleast_1d(ok)][:3]}")


def _numerator(cone: TwoIntervalCone, u):
    return (u - cone.a1) * (u - cone.b1) * (u - cone.a2) * (u - cone.b2)


def _numerator_prime(cone: TwoIntervalCone, u):
    e = (cone.a1, cone.b1, cone.a2, cone.b2)
    total = 0.0
    for i in range(4):
        term = 1.0
        for j in range(4):
            if j != i:
                term = term * (u - e[j])
        total = total + term
    return total


def _q(cone, u):
    return cone.L * u * u - 2.0 * cone.M * u + cone.N


def velocity_n2(cone: TwoIntervalCone, u):
    """V(u) = -(u-a1)(u-b1)(u-a2)(u-b2) / (L u^2 - 2 M u + N); du/ds = -2 pi V."""
    ua = np.asarray(u, dtype=float)
    _check_closed(cone, ua)
    out = -_numerator(cone, ua) / _q(cone, ua)
    return float(out) if out.ndim == 0 else out


def velocity_n2_prime(cone: TwoIntervalCone, u):
    """dV/du by the quotient rule."""
    ua = np.asarray(u, dtype=float)
    _check_closed(cone, ua)
    q = _q(cone, ua)
    qp = 2.0 * cone.L * ua - 2.0 * cone.M
    out = -(_numerator_prime(cone, ua) * q - _numerator(cone, ua) * qp) / q**2
    return float(out) if out.ndim == 0 else out


def velocity_symmetric(a: float, b: float, u):
    """The velocity field of the symmetric cone (a, b) x (-1/a, -1/b)."""
    u = np.asarray(u, dtype=float)
    out = -(u - a) * (a * u + 1) * (u - b) * (b * u + 1) / ((b - a) * (1 + a * b) * (1 + u * u))
    return float(out) if out.ndim == 0 else out


def orbit_invariant(cone: TwoIntervalCone, u, v):
    """exp(zeta(u) - zeta(v)) written out; constant along every orbit."""
    ua, va = np.asarray(u, float), np.asarray(v, float)
    if not (np.all((ua > cone.a1) & (ua < cone.b1)) and np.all((va > cone.a2) & (va < cone.b2))):
        raise OutsideDomain("need u inside (a1, b1) and v inside (a2, b2)")
    a1, b1, a2, b2 = cone.a1, cone.b1, cone.a2, cone.b2
    out = ((ua - a1) * (ua - a2) / ((ua - b1) * (ua - b2))) * \
        ((va - b1) * (va - b2) / ((va - a1) * (va - a2)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OrbitSample:
    s: float
    u: float
    v: float
    invariant_value: float

    @property
    def t(self) -> float:
        return 0.5 * (self.u + self.v)

    @property
    def x(self) -> float:
        return 0.5 * (self.u - self.v)


def trace_orbit(cone: TwoIntervalCone, start: Sequence[float],
                s_grid: Iterable[float]) -> list[OrbitSample]:
    """Closed-form orbit through start = (t, x): zeta(u_s) = zeta(u_0) - 2 pi s, same for v."""
    t0, x0 = start
    if not cone.contains(t0, x0):
        raise OutsideDomain(f"start point {(t0, x0)} is not inside the double cone")
    s = np.asarray(list(s_grid), dtype=float)
    ctx = cone.context
    u0, v0 = t0 + x0, t0 - x0
    zu, zv = zeta(ctx, u0), zeta(ctx, v0)
    m = s.size
    sol = invert(ctx, np.concatenate([zu - TWO_PI * s, zv - TWO_PI * s]),
                 np.concatenate([np.ones(m, int), np.zeros(m, int)]))
    us, vs = sol[:m], sol[m:]
    inv = orbit_invariant(cone, us, vs)
    return [OrbitSample(float(a), float(b), float(c), float(d))
            for a, b, c, d in zip(s, us, vs, np.atleast_1d(inv))]


# ---------------------------------------------------------------------------
# partner points and the boost orbit


def partner_point(cone: TwoIntervalCone, u):
    """The other preimage of zeta(u): maps (a1, b1) onto (a2, b2) and back."""
    ctx = cone.context
    ua = np.asarray(u, float)
    k = component_index(ctx, ua)
    out = invert(ctx, np.ravel(zeta(ctx, ua)), 1 - np.ravel(k)).reshape(ua.shape)
    return float(out) if out.ndim == 0 else out


def boost_hyperbola(cone: TwoIntervalCone) -> tuple[float, float]:
    """(t0, rho) with the invariant-one orbit equal to (u - t0)(v - t0) = -rho^2.

    The partner map is the Moebius involution u -> (alpha u + beta)/(gamma u - alpha)
    exchanging a1 <-> a2 and b1 <-> b2; its fixed points are t0 +- i rho.
    """
    r1 = np.array([cone.a1 + cone.a2, 1.0, -cone.a1 * cone.a2])
    r2 = np.array([cone.b1 + cone.b2, 1.0, -cone.b1 * cone.b2])
    alpha, beta, gamma = np.cross(r1, r2)
    disc = alpha**2 + beta * gamma
    if gamma == 0 or disc >= 0:
        raise DegenerateCone("partner involution has real fixed points")
    return float(alpha / gamma), float(math.sqrt(-disc) / abs(gamma))
