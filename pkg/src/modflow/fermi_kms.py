"""Free Fermi two-point functions under the mixed modular flow of a
symmetric n-interval, the KMS check, the trigonometric identities behind
the closed form, and the sl(2) ladder recursion."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NearSingular, OutsideDomain, RegulatedPole
from .geometry import TWO_PI, NInterval
from .mixing import _omega_eig, flowed_positions, omega_matrix, top_angle_path
from .uniformization import as_context, component_index, zeta, zeta_prime


@dataclass(frozen=True)
class CorrelatorValue:
    value: complex
    t: complex
    s: complex
    i: int
    j: int
    epsilon: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


def psi_2pt(x: float, y: float, epsilon: float) -> complex:
    """<psi(x) psi(y)> = -i / (x - y - i eps)."""
    return -1j / (x - y - 1j * epsilon)


def angular_kernel(xi, eta, epsilon: float, dxi=1.0, deta=1.0):
    """(-i/2) sqrt(dxi) sqrt(deta) / sin((xi - eta - i eps)/2)."""
    return -0.5j * np.sqrt(dxi) * np.sqrt(deta) / np.sin((np.asarray(xi) - eta - 1j * epsilon) / 2)


def _symmetric(E):
    ctx = as_context(E)
    sym = ctx.E.symmetric_arc()
    if sym is None:
        raise ValueError("correlators need a symmetric n-interval")
    return ctx, sym[0], sym[1]


def _desc_index(ctx, x) -> int:
    return ctx.n - 1 - int(component_index(ctx, x))


def correlator_mixed(E, x: float, y: float, t: float, s: float,
                     epsilon: float) -> CorrelatorValue:
    """<sigma_t(psi(x)) sigma_s(psi(y))> as the double sum over components.

    Each term carries the mixing entries O_ik(t) O_jl(s), the Jacobians
    d xi_k(t)/dx and d eta_l(s)/dy, and the angular kernel with regulator
    epsilon. epsilon = 0 gives the unregulated value away from coincidences.
    """
    ctx, arc, n = _symmetric(E)
    i, j = _desc_index(ctx, x), _desc_index(ctx, y)
    om = omega_matrix(n)
    xi_path = top_angle_path(arc, n, [0.0, t], x)
    eta_path = top_angle_path(arc, n, [0.0, s], y)
    Ot = om.exp(xi_path[1] - xi_path[0])
    Os = om.exp(eta_path[1] - eta_path[0])
    xk = flowed_positions(ctx, t, x)
    yl = flowed_positions(ctx, s, y)
    xi = 2.0 * np.arctan(xk)
    eta = 2.0 * np.arctan(yl)
    dxi = 2.0 / (1.0 + xk**2) * zeta_prime(ctx, x) / zeta_prime(ctx, xk)
    deta = 2.0 / (1.0 + yl**2) * zeta_prime(ctx, y) / zeta_prime(ctx, yl)
    kern = angular_kernel(xi[:, None], eta[None, :], epsilon, dxi[:, None], deta[None, :])
    value = complex(Ot[i] @ kern @ Os[j])
    return CorrelatorValue(value, t, s, i, j, float(epsilon))


def closed_prefactor(E, x: float, y: float) -> complex:
    """The (t, s)-independent factor f(x, y).

    It is the unregulated value at t = s = 0, -i/(x - y), divided by the
    kernel 1/(X - Y) at t = s = 0, X = exp(zeta(x)), Y = exp(zeta(y)).
    """
    ctx = as_context(E)
    X, Y = math.exp(zeta(ctx, x)), math.exp(zeta(ctx, y))
    if x == y:
        return -1j * X * zeta_prime(ctx, x)
    if abs(X - Y) <= 1e-12 * max(X, Y):
        raise RegulatedPole("x and y are partner points (equal zeta); the factor is undefined")
    return -1j * (X - Y) / (x - y)


def correlator_closed(E, x: float, y: float, t: complex, s: complex,
                      epsilon: float) -> CorrelatorValue:
    """e^{-pi(t+s)} / (e^{-2 pi t} X - e^{-2 pi s} Y - i eps) * f(x, y).

    t and s may be complex; they only enter through exponentials.
    """
    ctx, _, _ = _symmetric(E)
    i, j = _desc_index(ctx, x), _desc_index(ctx, y)
    X, Y = math.exp(zeta(ctx, x)), math.exp(zeta(ctx, y))
    f = closed_prefactor(ctx, x, y)
    den = cmath.exp(-TWO_PI * t) * X - cmath.exp(-TWO_PI * s) * Y - 1j * epsilon
    if abs(den) < 0.5 * epsilon or den == 0:
        raise RegulatedPole(f"denominator {abs(den):.3e} below epsilon/2")
    value = cmath.exp(-math.pi * (t + s)) / den * f
    return CorrelatorValue(complex(value), t, s, i, j, float(epsilon))


def kms_residual(E, x: float, y: float, epsilon: float) -> float:
    """Relative difference of <psi(x) sigma_{-i/2} psi(y)> and <psi(y) sigma_{-i/2} psi(x)>."""
    if x == y:
        raise OutsideDomain("KMS check needs x != y")
    lhs = correlator_closed(E, x, y, 0.0, -0.5j, epsilon).value
    rhs = correlator_closed(E, y, x, 0.0, -0.5j, epsilon).value
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


HALF_LINE = NInterval.from_pairs([(0.0, math.inf)])


def single_interval_ratio(E, x: float, y: float, t: float, s: float,
                          epsilon: float = 0.0) -> complex:
    """Mixed correlator on E divided by the half-line correlator at X = e^zeta(x), Y = e^zeta(y)."""
    ctx = as_context(E)
    X, Y = math.exp(zeta(ctx, x)), math.exp(zeta(ctx, y))
    num = correlator_mixed(ctx, x, y, t, s, epsilon).value
    den = correlator_mixed(HALF_LINE, X, Y, t, s, epsilon).value
    return num / den


# ---------------------------------------------------------------------------
# trigonometric identities


def sin_k(alpha, k, n):
    return np.sin(alpha - np.asarray(k) * math.pi / n)


def lemma_identities(n: int, alpha, beta_angle, j: int) -> tuple:
    """Residuals of the three identities, elementwise over alpha/beta arrays.

    (i)   prod_k sin_k(a) = (-2)^(1-n) sin(n a)
    (ii)  sum_{k != j} cot((j - k) pi / n) = 0
    (iii) sum_k exp(2(a - b) Omega)_jk / sin_k(a) = sin(n b)/sin(n a) / sin_j(b)

    (i) and (ii) are absolute; (iii) is relative to max(1, |rhs|).
    """
    if n < 1 or not 0 <= j < n:
        raise ValueError("need n >= 1 and 0 <= j < n")
    a = np.asarray(alpha, float)
    b = np.asarray(beta_angle, float)
    ks = np.arange(n)
    sa = sin_k(a[..., None], ks, n)
    sb = sin_k(b[..., None], ks, n)
    small = min(np.min(np.abs(sa)), np.min(np.abs(sb)),
                np.min(np.abs(np.sin(n * a))), np.min(np.abs(np.sin(n * b))))
    if small < 1e-8:
        warnings.warn("angles within 1e-8 of a zero of the sines", NearSingular, stacklevel=2)
    r1 = np.abs(np.prod(sa, axis=-1) - (-2.0) ** (1 - n) * np.sin(n * a))
    others = ks[ks != j]
    r2 = abs(float(np.sum(1.0 / np.tan((j - others) * math.pi / n)))) if others.size else 0.0
    aa, bb = np.broadcast_arrays(a, b)
    # exp(c Omega)_jk = sum_p V_jp exp(-i c lam_p) conj(V_kp), with c = 2(a - b)
    lam, vec = _omega_eig(n)
    phase = np.exp(-2j * (aa - bb)[..., None] * lam)
    proj = (1.0 / sin_k(aa[..., None], ks, n)) @ vec.conj()
    lhs = np.sum(vec[j] * phase * proj, axis=-1).real
    rhs = np.sin(n * bb) / np.sin(n * aa) / sin_k(bb, j, n)
    r3 = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))
    def _o(v):
        return float(v) if np.ndim(v) == 0 else v
    return _o(r1), r2, _o(r3)


# ---------------------------------------------------------------------------
# sl(2) recursion


@dataclass(frozen=True, eq=False)
class Sl2Recursion:
    """Coefficients c_m of a formal solution of L_1 Phi = L_-1 Phi."""

    h: float
    coefficients: np.ndarray
    partial_sums: np.ndarray


def sl2_coefficients(h: float, N: int) -> np.ndarray:
    """c_0..c_N from c_{m+1} sqrt((m+1)(2h+m)) = c_{m-1} sqrt(m(2h+m-1)), c_0 = 1, c_1 = 0."""
    if h <= 0:
        raise ValueError("h must be positive")
    if N < 2:
        raise ValueError("N must be at least 2")
    c = np.zeros(N + 1)
    c[0] = 1.0
    m = np.arange(1, N, 2, dtype=float)         # m = 1, 3, 5, ... gives c_2, c_4, ...
    ratio = np.sqrt(m * (2 * h + m - 1) / ((m + 1) * (2 * h + m)))
    c[2::2] = np.cumprod(ratio)[: len(c[2::2])]
    return c


def sl2_recursion(h: float, N: int) -> Sl2Recursion:
    c = sl2_coefficients(h, N)
    return Sl2Recursion(float(h), c, np.cumsum(c**2))


def sl2_partial_sums(h: float, N: int) -> np.ndarray:
    """S(M) = sum_{m <= M} |c_m|^2 for M = 0..N."""
    return sl2_recursion(h, N).partial_sums
