"""Moebius maps, the Cayley transform, intervals on the line and circle,
and the Schwarzian derivative."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import BoundaryPoint, SingularDerivative

TWO_PI = 2.0 * math.pi


class _Infinity:
    """The point at infinity of the extended real line (a singleton tag)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_infinite(x) -> bool:
    """True for the INF tag and for float infinities."""
    if x is INF:
        return True
    try:
        return math.isinf(x)
    except TypeError:
        return cmath.isinf(x)


def wrap_angle(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    return math.pi - (math.pi - theta) % TWO_PI


# ---------------------------------------------------------------------------
# Moebius maps


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored with determinant 1.

    The matrix is only defined up to an overall sign; use `isclose` to
    compare two maps.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise ValueError("Moebius matrix must be invertible")
        r = cmath.sqrt(det)
        a, b, c, d = a / r, b / r, c / r, d / r
        # keep real maps real when possible
        vals = []
        for v in (a, b, c, d):
            vals.append(complex(v.real, 0.0) if abs(v.imag) <= 1e-15 * (1 + abs(v.real)) else v)
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)

    @classmethod
    def _unit(cls, m) -> "MoebiusMap":
        # m is known to have determinant 1; recomputing ad - bc would only
        # add cancellation error for ill-conditioned matrices
        out = object.__new__(cls)
        for name, v in zip("abcd", np.asarray(m, dtype=complex).ravel()):
            object.__setattr__(out, name, complex(v))
        return out

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def from_points(cls, src: Sequence[complex], dst: Sequence[complex]) -> "MoebiusMap":
        """The unique map sending three distinct finite points src -> dst."""
        return _to_standard(dst).inverse() @ _to_standard(src)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        # (self @ other)(z) = self(other(z)); determinants multiply to 1
        return MoebiusMap._unit(self.matrix @ other.matrix)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        if z is INF:
            return INF if self.c == 0 else self.a / self.c
        if isinstance(z, np.ndarray):
            z = z.astype(complex)
            return (self.a * z + self.b) / (self.c * z + self.d)
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def derivative(self, z: complex) -> complex:
        return 1.0 / (self.c * z + self.d) ** 2

    def derivatives(self, z: complex) -> tuple[complex, complex, complex]:
        """First three derivatives at z (uses det = 1)."""
        w = self.c * z + self.d
        return 1.0 / w**2, -2.0 * self.c / w**3, 6.0 * self.c**2 / w**4

    def isclose(self, other: "MoebiusMap", tol: float = 1e-12) -> bool:
        m1, m2 = self.matrix, other.matrix
        return bool(min(np.max(np.abs(m1 - m2)), np.max(np.abs(m1 + m2))) <= tol)


def _to_standard(q: Sequence[complex]) -> MoebiusMap:
    # sends q0 -> 0, q1 -> 1, q2 -> infinity
    q0, q1, q2 = (complex(v) for v in q)
    if len({q0, q1, q2}) < 3:
        raise ValueError("three distinct points required")
    return MoebiusMap(q1 - q2, -q0 * (q1 - q2), q1 - q0, -q2 * (q1 - q0))


def dilation(s: float) -> MoebiusMap:
    """x -> e^s x."""
    return MoebiusMap(math.exp(s / 2), 0, 0, math.exp(-s / 2))


CAYLEY = MoebiusMap(1j, 1, -1j, 1)


def cayley(x) -> complex:
    """C(x) = (1 + ix)/(1 - ix); infinity goes to -1."""
    if is_infinite(x):
        return complex(-1.0, 0.0)
    x = float(x)
    if abs(x) > 1.0:
        r = 1.0 / x
        q = 1.0 + r * r
        return complex((r * r - 1.0) / q, 2.0 * r / q)
    q = 1.0 + x * x
    return complex((1.0 - x * x) / q, 2.0 * x / q)


def cayley_inv(z: complex, tol: float = 1e-15) -> float:
    """Inverse Cayley transform of a unit-modulus point, tan(xi/2) for z = e^{i xi}."""
    z = complex(z)
    if abs(z + 1.0) <= tol:
        raise BoundaryPoint(f"{z} is the point -1 (infinity on the line)")
    re, im = z.real, z.imag
    if re >= 0:
        return im / (1.0 + re)
    return (1.0 - re) / im


def cayley_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    q = 1.0 + x * x
    return ((1.0 - x * x) + 2j * x) / q


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class RealInterval:
    """Open interval (lo, hi) of the real line; either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"interval needs lo < hi, got ({lo}, {hi})")
        if lo == math.inf or hi == -math.inf:
            raise ValueError("interval endpoints in wrong direction")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class CircleArc:
    """Counter-clockwise arc of the unit circle from angle `start` to `end`."""

    start: float
    end: float

    def __post_init__(self):
        s, e = wrap_angle(float(self.start)), wrap_angle(float(self.end))
        if s == e:
            raise ValueError("arc endpoints must be distinct")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @property
    def length(self) -> float:
        return (self.end - self.start) % TWO_PI

    @property
    def mid_angle(self) -> float:
        return wrap_angle(self.start + 0.5 * self.length)

    def offset(self, z: complex) -> float:
        """Counter-clockwise angle from the start point to z, in [0, 2pi)."""
        return (cmath.phase(z) - self.start) % TWO_PI

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        o = self.offset(z)
        return tol < o < self.length - tol

    def points(self) -> tuple[complex, complex, complex]:
        return (cmath.exp(1j * self.start), cmath.exp(1j * self.mid_angle),
                cmath.exp(1j * self.end))


UPPER_HALF_CIRCLE = CircleArc(0.0, math.pi)


@dataclass(frozen=True)
class NInterval:
    """Union of n open real intervals whose closures are pairwise disjoint."""

    components: tuple[RealInterval, ...]

    def __post_init__(self):
        comps = tuple(c if isinstance(c, RealInterval) else RealInterval(*c)
                      for c in self.components)
        if not comps:
            raise ValueError("an n-interval needs at least one component")
        for left, right in zip(comps, comps[1:]):
            if not left.hi < right.lo:
                raise ValueError(
                    "components must be sorted with disjoint closures "
                    f"(b_k < a_k+1 violated: {left.hi} >= {right.lo})")
        if math.isinf(comps[0].lo) and math.isinf(comps[-1].hi):
            raise ValueError("the point at infinity must not be interior to the union")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_pairs(cls, pairs) -> "NInterval":
        return cls(tuple(RealInterval(float(a), float(b)) for a, b in pairs))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def lower(self) -> np.ndarray:
        return np.array([c.lo for c in self.components])

    @property
    def upper(self) -> np.ndarray:
        return np.array([c.hi for c in self.components])

    def component_of(self, x: float) -> int | None:
        for k, c in enumerate(self.components):
            if c.lo < x < c.hi:
                return k
        return None

    def pairs(self) -> list[tuple[float, float]]:
        return [(c.lo, c.hi) for c in self.components]

    def symmetric_arc(self, tol: float = 1e-9) -> tuple[CircleArc, int] | None:
        """(I, n) if the Cayley image is {z : z^n in I}, otherwise None."""
        n = self.n
        starts = [cayley(c.lo) ** n for c in self.components]
        ends = [cayley(c.hi) ** n for c in self.components]
        if max(abs(s - starts[0]) for s in starts) > tol:
            return None
        if max(abs(e - ends[0]) for e in ends) > tol:
            return None
        arc = CircleArc(cmath.phase(starts[0]), cmath.phase(ends[0]))
        lengths = [2.0 * (math.atan(c.hi) - math.atan(c.lo)) for c in self.components]
        if max(abs(n * L - arc.length) for L in lengths) > 1e-7:
            return None
        return arc, n


def symmetric_ninterval(arc: CircleArc, n: int, snap: float = 1e-12) -> NInterval:
    """Cayley preimage of the n-th root {z : z^n in arc} as an NInterval."""
    if n < 1:
        raise ValueError("n must be positive")
    comps = []
    for k in range(n):
        lo = (arc.start + TWO_PI * k) / n
        lo = wrap_angle(lo)
        if abs(lo - math.pi) <= snap:
            lo = -math.pi
        hi = lo + arc.length / n
        if hi > math.pi + snap:
            raise ValueError("a component contains the point -1 in its interior")
        a = -math.inf if lo == -math.pi else math.tan(lo / 2)
        b = math.inf if abs(hi - math.pi) <= snap else math.tan(hi / 2)
        comps.append(RealInterval(a, b))
    comps.sort(key=lambda c: c.lo)
    return NInterval(tuple(comps))


def root_arcs(arc: CircleArc, n: int) -> list[CircleArc]:
    """The n arcs of the n-th root of `arc`, ordered by decreasing angle."""
    out = []
    for k in range(n):
        lo = (arc.start + TWO_PI * k) / n
        out.append(CircleArc(lo, lo + arc.length / n))
    return sorted(out, key=lambda c: -c.mid_angle)


# ---------------------------------------------------------------------------
# the dilation group of an interval


def standard_chart(I: RealInterval | CircleArc) -> MoebiusMap:
    """Orientation-preserving Moebius map sending (0, inf) onto I."""
    if isinstance(I, CircleArc):
        p0, pm, p1 = I.points()
        # y = 0 -> start, y = 1 -> midpoint, y = inf -> end
        return _to_standard((p0, pm, p1)).inverse()
    lo, hi = I.lo, I.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return MoebiusMap(hi, lo, 1.0, 1.0)
    if math.isfinite(lo):
        return MoebiusMap(1.0, lo, 0.0, 1.0)
    if math.isfinite(hi):
        return MoebiusMap(hi, -1.0, 1.0, 0.0)
    raise ValueError("the whole line has no dilation subgroup fixing two endpoints")


@lru_cache(maxsize=256)
def _chart_pair(I) -> tuple[MoebiusMap, MoebiusMap]:
    m = standard_chart(I)
    return m, m.inverse()


@lru_cache(maxsize=256)
def _generator(I) -> np.ndarray:
    """G = M diag(1, -1) M^-1 for the standard chart M of I."""
    if isinstance(I, RealInterval) and I.bounded:
        lo, hi = I.lo, I.hi
        w = hi - lo
        return np.array([[hi + lo, -2.0 * hi * lo], [2.0, -(hi + lo)]]) / w
    m, minv = _chart_pair(I)
    return (m.matrix * np.array([1.0, -1.0])) @ minv.matrix


def lambda_I(I: RealInterval | CircleArc, s: float) -> MoebiusMap:
    """Lambda_I(s): the dilations fixing I, with Lambda_(0,inf)(s) x = e^s x.

    Written as cosh(s/2) + sinh(s/2) G, which avoids the cancellation of
    the triple product M D(s) M^-1 for short intervals.
    """
    G = _generator(I)
    # tr G = 0 and det G = -1, so the determinant is cosh^2 - sinh^2 = 1
    return MoebiusMap._unit(math.cosh(s / 2) * np.eye(2) + math.sinh(s / 2) * G)


# ---------------------------------------------------------------------------
# Schwarzian derivative


@dataclass(frozen=True)
class PowerMap:
    """z -> z^nu on the principal branch."""

    nu: float

    def __call__(self, z):
        return complex(z) ** self.nu

    def derivatives(self, z: complex) -> tuple[complex, complex, complex]:
        nu, z = self.nu, complex(z)
        return (nu * z ** (nu - 1), nu * (nu - 1) * z ** (nu - 2),
                nu * (nu - 1) * (nu - 2) * z ** (nu - 3))


def schwarzian_from_derivatives(d1: complex, d2: complex, d3: complex,
                                tol: float = 1e-12) -> complex:
    if abs(d1) < tol:
        raise SingularDerivative("first derivative vanishes")
    r = d2 / d1
    return d3 / d1 - 1.5 * r * r


def stencil_derivatives(f: Callable, z, h: float = 1e-3) -> tuple[complex, complex, complex]:
    """f', f'', f''' from 5-point central stencils with one Richardson step."""

    def once(step):
        fp2, fp1 = f(z + 2 * step), f(z + step)
        fm1, fm2 = f(z - step), f(z - 2 * step)
        f0 = f(z)
        d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step)
        d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * step**2)
        d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * step**3)
        return d1, d2, d3

    fine, coarse = once(h), once(2 * h)
    # d1, d2 have O(h^4) error, d3 O(h^2); one extrapolation step each
    d1 = (16 * fine[0] - coarse[0]) / 15
    d2 = (16 * fine[1] - coarse[1]) / 15
    d3 = (4 * fine[2] - coarse[2]) / 3
    return d1, d2, d3


def schwarzian(f, z, h: float = 1e-3) -> complex:
    """D_z f = f'''/f' - 3/2 (f''/f')^2.

    Moebius maps give exactly 0 and power maps exactly (1 - nu^2)/(2 z^2).
    Objects exposing `derivatives(z)` use those; anything else is
    differentiated numerically with step h.
    """
    if h <= 0:
        raise ValueError("stencil step must be positive")
    if isinstance(f, MoebiusMap):
        return 0j
    if isinstance(f, PowerMap):
        if z == 0:
            raise SingularDerivative("z^nu at 0")
        return (1.0 - f.nu**2) / (2.0 * complex(z) ** 2)
    if hasattr(f, "derivatives"):
        return schwarzian_from_derivatives(*f.derivatives(z))
    return schwarzian_from_derivatives(*stencil_derivatives(f, z, h))
