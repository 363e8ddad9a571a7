"""The uniformizing function zeta of an n-interval and its inverse branches.

For E = (a_1, b_1) u ... u (a_n, b_n),

    exp(zeta(x)) = - prod_k (x - a_k) / (x - b_k),

which maps every component increasingly onto the real line. Infinite
endpoints are allowed; their factors are dropped (this only shifts zeta by
a constant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, OutsideDomain
from .geometry import MoebiusMap, NInterval, cayley, cayley_inv

PREIMAGE_TOL = 1e-14
MAX_ITER = 200


@dataclass(frozen=True)
class UniformizerContext:
    """An n-interval with cached endpoint arrays."""

    E: NInterval
    a: np.ndarray = field(init=False, repr=False, compare=False)
    b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", self.E.lower)
        object.__setattr__(self, "b", self.E.upper)

    @property
    def n(self) -> int:
        return self.E.n


def as_context(E) -> UniformizerContext:
    if isinstance(E, UniformizerContext):
        return E
    if isinstance(E, NInterval):
        return UniformizerContext(E)
    return UniformizerContext(NInterval.from_pairs(E))


def component_index(ctx, x) -> np.ndarray:
    """Index of the component strictly containing each x; raises OutsideDomain."""
    ctx = as_context(ctx)
    x = np.asarray(x, dtype=float)
    k = np.searchsorted(ctx.a, x, side="right") - 1
    kc = np.clip(k, 0, ctx.n - 1)
    inside = (k >= 0) & (x > ctx.a[kc]) & (x < ctx.b[kc])
    if not np.all(inside):
        bad = x[~inside] if x.ndim else x
        raise OutsideDomain(f"point(s) {np.atleast_1d(bad)[:3]} not inside {ctx.E.pairs()}")
    return kc


def _log_sum(d: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(d))


def _zeta_raw(ctx: UniformizerContext, x: np.ndarray) -> np.ndarray:
    d_a = x[..., None] - ctx.a
    d_b = x[..., None] - ctx.b
    ta = np.where(np.isfinite(ctx.a), _log_sum(d_a), 0.0)
    tb = np.where(np.isfinite(ctx.b), _log_sum(d_b), 0.0)
    return ta.sum(-1) - tb.sum(-1)


def _zeta_prime_raw(ctx: UniformizerContext, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        ta = np.where(np.isfinite(ctx.a), 1.0 / (x[..., None] - ctx.a), 0.0)
        tb = np.where(np.isfinite(ctx.b), 1.0 / (x[..., None] - ctx.b), 0.0)
    return ta.sum(-1) - tb.sum(-1)


def _scalar_or_array(x_in, out):
    return float(out) if np.ndim(x_in) == 0 else out


def zeta(ctx, x):
    """zeta(x) as a sum of logarithms; x must lie strictly inside E."""
    ctx = as_context(ctx)
    xa = np.asarray(x, dtype=float)
    component_index(ctx, xa)
    return _scalar_or_array(x, _zeta_raw(ctx, xa))


def zeta_prime(ctx, x):
    """zeta'(x) = sum_k 1/(x - a_k) - 1/(x - b_k), positive on E."""
    ctx = as_context(ctx)
    xa = np.asarray(x, dtype=float)
    component_index(ctx, xa)
    return _scalar_or_array(x, _zeta_prime_raw(ctx, xa))


# ---------------------------------------------------------------------------
# inverse branches
#
# Each component k is parametrized by a chart w in R: x = a + (b-a) expit(w)
# for bounded components, x = a + e^w or x = b - e^-w for half-lines. In
# these charts zeta(w) has slope 1 near both ends, and the distances to the
# component's own endpoints are available without cancellation, so the
# solve keeps full relative accuracy even very close to an endpoint.


def _chart(lo, hi, w):
    """Return (x, d_lo, d_hi, dx/dw); inf marks a missing distance."""
    fin_lo, fin_hi = np.isfinite(lo), np.isfinite(hi)
    both = fin_lo & fin_hi
    width = np.where(both, hi - lo, 1.0)
    # logistic chart, written to avoid overflow for large |w|
    e = np.exp(-np.abs(w))
    s_small = e / (1.0 + e)          # expit(-|w|)
    s_big = 1.0 / (1.0 + e)          # expit(|w|)
    p = np.where(w >= 0, s_big, s_small)     # expit(w)
    q = np.where(w >= 0, s_small, s_big)     # expit(-w)
    d_lo = np.where(both, width * p, np.inf)
    d_hi = np.where(both, width * q, np.inf)
    # half-lines
    with np.errstate(over="ignore"):
        ew = np.exp(np.clip(w, -745, 709))
        emw = np.exp(np.clip(-w, -745, 709))
    d_lo = np.where(fin_lo & ~fin_hi, ew, d_lo)
    d_hi = np.where(~fin_lo & fin_hi, emw, d_hi)
    with np.errstate(invalid="ignore"):
        x = np.where(fin_lo, np.where(both & (w > 0), hi - d_hi, lo + d_lo), hi - d_hi)
    dxdw = np.where(both, d_lo * d_hi / width, np.where(fin_lo, d_lo, d_hi))
    return x, d_lo, d_hi, dxdw


def _own_terms(d_lo, d_hi):
    with np.errstate(divide="ignore"):
        z = np.where(np.isfinite(d_lo), np.log(d_lo), 0.0) - \
            np.where(np.isfinite(d_hi), np.log(d_hi), 0.0)
        zp = np.where(np.isfinite(d_lo), 1.0 / d_lo, 0.0) + \
            np.where(np.isfinite(d_hi), 1.0 / d_hi, 0.0)
    return z, zp


def _other_terms(ctx, x, k):
    n = ctx.n
    mask = np.arange(n)[None, :] != k[:, None]
    fa = np.isfinite(ctx.a)[None, :] & mask
    fb = np.isfinite(ctx.b)[None, :] & mask
    da = x[:, None] - ctx.a[None, :]
    db = x[:, None] - ctx.b[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(fa, np.log(np.abs(np.where(fa, da, 1.0))), 0.0).sum(1) - \
            np.where(fb, np.log(np.abs(np.where(fb, db, 1.0))), 0.0).sum(1)
        zp = np.where(fa, 1.0 / np.where(fa, da, 1.0), 0.0).sum(1) - \
            np.where(fb, 1.0 / np.where(fb, db, 1.0), 0.0).sum(1)
    return z, zp


def _chart_eval(ctx, k, lo, hi, w):
    x, d_lo, d_hi, dxdw = _chart(lo, hi, w)
    z1, zp1 = _own_terms(d_lo, d_hi)
    z2, zp2 = _other_terms(ctx, x, k)
    return x, z1 + z2, (zp1 + zp2) * dxdw


def invert(ctx, zvals, ks) -> np.ndarray:
    """Solve zeta(x) = zvals[i] inside component ks[i], for all i at once.

    Safeguarded Newton in the chart variable: every iterate updates a
    bracket from the sign of zeta - target, and a step leaving the bracket
    is replaced by bisection (or bracket expansion while one side is still
    open). Starts at the component midpoint.
    """
    ctx = as_context(ctx)
    z = np.atleast_1d(np.asarray(zvals, dtype=float)).ravel()
    k = np.broadcast_to(np.atleast_1d(np.asarray(ks, dtype=int)), z.shape).ravel().copy()
    if not np.all(np.isfinite(z)):
        raise ValueError("zeta value must be finite")
    lo, hi = ctx.a[k], ctx.b[k]
    w = np.zeros_like(z)
    w_lo = np.full_like(z, -np.inf)
    w_hi = np.full_like(z, np.inf)
    done = np.zeros(z.shape, dtype=bool)
    x = np.empty_like(z)
    tol = PREIMAGE_TOL * np.maximum(1.0, np.abs(z))
    for _ in range(MAX_ITER):
        act = ~done
        xa, za, dza = _chart_eval(ctx, k[act], lo[act], hi[act], w[act])
        g = za - z[act]
        x[act] = xa
        wa = w[act]
        below = g < 0
        w_lo[act] = np.where(below, np.maximum(w_lo[act], wa), w_lo[act])
        w_hi[act] = np.where(~below, np.minimum(w_hi[act], wa), w_hi[act])
        conv = np.abs(g) <= tol[act]
        step = -g / dza
        w_new = wa + step
        lo_b, hi_b = w_lo[act], w_hi[act]
        bad = ~(w_new > lo_b) | ~(w_new < hi_b) | ~np.isfinite(w_new)
        both = np.isfinite(lo_b) & np.isfinite(hi_b)
        expand = np.where(below, wa + np.maximum(1.0, np.abs(wa)), wa - np.maximum(1.0, np.abs(wa)))
        w_new = np.where(bad, np.where(both, 0.5 * (lo_b + hi_b), expand), w_new)
        tiny = np.abs(w_new - wa) <= 4e-16 * np.maximum(1.0, np.abs(wa))
        conv |= tiny
        w[act] = np.where(conv, wa, w_new)
        idx = np.flatnonzero(act)
        done[idx[conv]] = True
        if done.all():
            return x
    raise ConvergenceFailure(
        f"preimage solve did not converge in {MAX_ITER} iterations "
        f"for {int((~done).sum())} target(s)")


def preimages(ctx, zeta_val):
    """The n points x_k with zeta(x_k) = zeta_val, one per component, ascending.

    An array of targets of shape (m,) gives a result of shape (m, n).
    """
    ctx = as_context(ctx)
    zv = np.asarray(zeta_val, dtype=float)
    n = ctx.n
    flat = np.repeat(zv.ravel(), n)
    ks = np.tile(np.arange(n), zv.size)
    out = invert(ctx, flat, ks).reshape(zv.shape + (n,))
    return out


def preimage(ctx, zeta_val, k: int) -> float:
    """Single inverse branch in component k."""
    return float(invert(ctx, [zeta_val], [k])[0])


def g_map(ctx, mu: MoebiusMap, z: complex) -> complex:
    """g = mu^-1 o C o exp o zeta o C^-1 on the Cayley image of E."""
    ctx = as_context(ctx)
    x = cayley_inv(z)
    ze = zeta(ctx, x)
    if ze > 700:
        w = complex(-1.0, 0.0)
    else:
        w = cayley(math.exp(ze))
    return complex(mu.inverse()(w))
