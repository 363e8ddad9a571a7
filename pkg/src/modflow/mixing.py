"""Mixing matrices O(t) coupling the components of an n-interval.

Component indices in this module run in descending position: index 0 is
the rightmost interval (largest x, largest angle on the circle), index
n-1 the leftmost. `NInterval` itself stays sorted ascending.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceFailure, DegenerateCone
from .flow import TwoIntervalCone, flow_circle_angle, flow_zeta
from .geometry import TWO_PI, CircleArc, cayley, root_arcs, symmetric_ninterval
from .uniformization import _zeta_prime_raw, as_context, invert, zeta

STEPS_PER_UNIT = 10_000


@lru_cache(maxsize=64)
def _omega_entries(n: int) -> np.ndarray:
    k = np.arange(n)
    diff = k[:, None] - k[None, :]
    with np.errstate(divide="ignore"):
        om = 1.0 / (2.0 * np.sin(diff * math.pi / n))
    om[diff == 0] = 0.0
    # exact antisymmetry (sin rounding is not perfectly odd in the last bit)
    om = 0.5 * (om - om.T)
    om.setflags(write=False)
    return om


@lru_cache(maxsize=64)
def _omega_eig(n: int):
    # i*Omega is Hermitian
    lam, vec = np.linalg.eigh(1j * _omega_entries(n))
    return lam, vec


@dataclass(frozen=True, eq=False)
class OmegaGenerator:
    """Omega_kl = 1 / (2 sin((k - l) pi / n)), zero on the diagonal."""

    n: int
    entries: np.ndarray

    def exp(self, c: float) -> np.ndarray:
        """exp(c * Omega)."""
        if self.n == 1:
            return np.ones((1, 1))
        if self.n == 2:
            th = 0.5 * c
            return np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        lam, vec = _omega_eig(self.n)
        # Omega = -i V diag(lam) V^H
        m = (vec * np.exp(-1j * c * lam)) @ vec.conj().T
        return m.real if np.isrealobj(c) or np.imag(c) == 0 else m


def omega_matrix(n: int) -> OmegaGenerator:
    if n < 1:
        raise ValueError("n must be positive")
    return OmegaGenerator(n, _omega_entries(n))


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    n: int
    entries: np.ndarray
    t: float

    @property
    def defect(self) -> float:
        """Frobenius norm of O^T O - 1."""
        o = self.entries
        return float(np.linalg.norm(o.T @ o - np.eye(self.n)))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    @property
    def rotation_angle(self) -> float:
        if self.n != 2:
            raise ValueError("rotation angle only defined for n = 2")
        return rotation_angle(self.entries)


def rotation_angle(o: np.ndarray) -> float:
    """theta with o = [[cos, -sin], [sin, cos]]."""
    return math.atan2(o[1, 0], o[0, 0])


# ---------------------------------------------------------------------------
# positions and K


def _start_zeta(ctx, x) -> float:
    return 0.0 if x is None else zeta(ctx, x)


def flowed_positions(E, t, x=None) -> np.ndarray:
    """x_k(t) in descending order; shape (n,) or (m, n) for an array of t."""
    ctx = as_context(E)
    z0 = _start_zeta(ctx, x)
    ta = np.atleast_1d(np.asarray(t, float))
    n = ctx.n
    z = np.repeat(z0 - TWO_PI * ta, n)
    ks = np.tile(np.arange(n)[::-1], ta.size)
    out = invert(ctx, z, ks).reshape(ta.size, n)
    return out[0] if np.ndim(t) == 0 else out


def _k_from_positions(ctx, pos: np.ndarray) -> np.ndarray:
    r = np.sqrt(1.0 / _zeta_prime_raw(ctx, pos))        # sqrt(dx/dzeta)
    diff = pos[..., :, None] - pos[..., None, :]
    n = pos.shape[-1]
    eye = np.eye(n, dtype=bool)
    with np.errstate(divide="ignore"):
        k = TWO_PI * r[..., :, None] * r[..., None, :] / np.where(eye, 1.0, diff)
    return np.where(eye, 0.0, k)


def k_matrix(E, t: float, x=None) -> np.ndarray:
    """K_jk = 2 pi sqrt(dx_j/dzeta) sqrt(dx_k/dzeta) / (x_j - x_k), K_jj = 0."""
    ctx = as_context(E)
    return _k_from_positions(ctx, flowed_positions(ctx, t, x))


# ---------------------------------------------------------------------------
# symmetric closed form


def top_angle_path(I: CircleArc, n: int, t, x=None):
    """Angle xi_0(t) of the flowed point in the top component."""
    top = root_arcs(I, n)[0]
    if x is None:
        E = symmetric_ninterval(I, n)
        x = float(invert(E, [0.0], [n - 1])[0])
    phi = cmath.phase(cayley(x))
    # rotate by an n-th root of unity into the top arc
    for m in range(n):
        cand = phi + TWO_PI * m / n
        if top.contains(cmath.exp(1j * cand)):
            phi = cand
            break
    else:
        raise ValueError("start point is not inside the n-interval")
    ts = np.atleast_1d(np.asarray(t, float))
    out = np.array([flow_circle_angle(I, n, float(s), phi) for s in ts])
    return float(out[0]) if np.ndim(t) == 0 else out


def mixing_closed_symmetric(I: CircleArc, n: int, t: float, x=None) -> MixingMatrix:
    """O(t) = exp((xi_0(t) - xi_0(0)) Omega) for the n-th root of I.

    `x` is a start point on the line (any component); by default the point
    of the top component with zeta = 0.
    """
    xi = top_angle_path(I, n, [0.0, float(t)], x)
    return MixingMatrix(n, omega_matrix(n).exp(xi[1] - xi[0]), float(t))


# ---------------------------------------------------------------------------
# ODE


def _segment_grid(targets: np.ndarray, steps_per_unit: int):
    """Step nodes from 0 through the sorted |targets|; returns (nodes, index of each target)."""
    nodes = [0.0]
    where = []
    prev = 0.0
    for tt in targets:
        m = max(1, int(math.ceil(abs(tt - prev) * steps_per_unit - 1e-9))) if tt != prev else 0
        if m:
            nodes.extend(prev + (tt - prev) * np.arange(1, m + 1) / m)
        where.append(len(nodes) - 1)
        prev = tt
    return np.asarray(nodes), where


def _integrate(ctx, z0: float, nodes: np.ndarray, track_defect: bool):
    n = ctx.n
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    times = np.concatenate([nodes, mids])
    z = np.repeat(z0 - TWO_PI * times, n)
    ks = np.tile(np.arange(n)[::-1], times.size)
    pos = invert(ctx, z, ks).reshape(times.size, n)
    K = _k_from_positions(ctx, pos)
    Kn, Km = K[: nodes.size], K[nodes.size:]
    O = np.eye(n)
    out = [O]
    worst = 0.0
    eye = np.eye(n)
    for i in range(nodes.size - 1):
        h = nodes[i + 1] - nodes[i]
        k1 = Kn[i] @ O
        k2 = Km[i] @ (O + 0.5 * h * k1)
        k3 = Km[i] @ (O + 0.5 * h * k2)
        k4 = Kn[i + 1] @ (O + h * k3)
        O = O + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if track_defect:
            worst = max(worst, float(np.linalg.norm(O.T @ O - eye)))
        out.append(O)
    if not np.all(np.isfinite(O)):
        raise ConvergenceFailure("mixing ODE produced non-finite entries")
    return out, worst


def mixing_ode_series(E, ts, steps_per_unit: int = STEPS_PER_UNIT, x=None,
                      track_defect: bool = False):
    """Integrate O' = K(t) O, O(0) = 1 once and sample it at every t in ts.

    Returns (list of MixingMatrix in the order of ts, largest defect seen
    at any step; 0.0 unless track_defect).
    """
    ctx = as_context(E)
    ts = np.asarray(ts, float)
    z0 = _start_zeta(ctx, x)
    result: dict[int, np.ndarray] = {}
    worst = 0.0
    for sign in (1.0, -1.0):
        idx = [i for i, v in enumerate(ts) if sign * v > 0]
        if not idx:
            continue
        order = sorted(idx, key=lambda i: sign * ts[i])
        targets = np.array([sign * ts[i] for i in order])
        nodes, where = _segment_grid(targets, steps_per_unit)
        mats, w = _integrate(ctx, z0, sign * nodes, track_defect)
        worst = max(worst, w)
        for i, pos in zip(order, where):
            result[i] = mats[pos]
    n = ctx.n
    out = [MixingMatrix(n, result.get(i, np.eye(n)), float(ts[i])) for i in range(ts.size)]
    return out, worst


def mixing_ode(E, t: float, steps: int | None = None, x=None) -> MixingMatrix:
    """RK4 with fixed steps (default 10^4 per unit t); no re-orthonormalization."""
    ctx = as_context(E)
    if steps is None:
        steps = max(1, int(math.ceil(abs(t) * STEPS_PER_UNIT)))
    if t == 0:
        return MixingMatrix(ctx.n, np.eye(ctx.n), 0.0)
    nodes = np.linspace(0.0, float(t), steps + 1)
    mats, _ = _integrate(ctx, _start_zeta(ctx, x), nodes, False)
    return MixingMatrix(ctx.n, mats[-1], float(t))


# ---------------------------------------------------------------------------
# two intervals


def mixing_angle_n2(cone: TwoIntervalCone, t: float, x0_start: float) -> float:
    """theta(t) = arctan((L x0(t) - M)/sqrt(D)) - arctan((L x0 - M)/sqrt(D)), D = LN - M^2."""
    D = cone.discriminant
    if D <= 0:
        raise DegenerateCone("LN - M^2 must be positive")
    rd = math.sqrt(D)
    xt = flow_zeta(cone.ninterval, t, x0_start)
    return math.atan((cone.L * xt - cone.M) / rd) - math.atan((cone.L * x0_start - cone.M) / rd)
