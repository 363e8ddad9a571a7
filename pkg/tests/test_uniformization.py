from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modflow.errors import OutsideDomain
from modflow.geometry import CircleArc, MoebiusMap, NInterval, cayley, symmetric_ninterval
from modflow.uniformization import (as_context, component_index, g_map, invert, preimage,
                                    preimages, zeta, zeta_prime)

TWO = NInterval.from_pairs([(0, 1), (2, 3)])
UNIT = NInterval.from_pairs([(0, 1)])
ROOT3 = math.sqrt(3.0)


def random_ninterval(rng, n):
    e = np.sort(rng.uniform(-5, 5, 2 * n))
    while np.min(np.diff(e)) < 1e-3:
        e = np.sort(rng.uniform(-5, 5, 2 * n))
    return NInterval.from_pairs(e.reshape(n, 2))


def test_zeta_midpoint_single():
    assert zeta(UNIT, 0.5) == pytest.approx(0.0, abs=1e-15)


def test_zeta_two_interval_root():
    assert zeta(TWO, (3 - ROOT3) / 2) == pytest.approx(0.0, abs=1e-14)
    assert zeta(TWO, (3 + ROOT3) / 2) == pytest.approx(0.0, abs=1e-14)


def test_zeta_diverges_at_endpoints():
    assert zeta(UNIT, 1e-300) < -600
    assert zeta(UNIT, 1 - 1e-16) > 30


def test_zeta_formula_matches_product():
    E = NInterval.from_pairs([(-3, -1.2), (0.4, 2.5)])
    x = np.array([-2.0, 1.0, 2.2])
    prod = -(x + 3) * (x - 0.4) / ((x + 1.2) * (x - 2.5))
    assert np.allclose(np.exp(zeta(E, x)), prod, rtol=1e-13)


def test_zeta_prime_examples():
    assert zeta_prime(UNIT, 0.5) == pytest.approx(4.0)
    assert zeta_prime(TWO, 0.5) == pytest.approx(4 - 1 / 1.5 + 1 / 2.5, abs=1e-14)
    assert zeta_prime(TWO, 0.5) == pytest.approx(3.7333333, abs=1e-7)


def test_zeta_prime_diverges_near_right_end():
    assert zeta_prime(UNIT, 1 - 1e-12) > 1e11


def test_zeta_outside_raises():
    with pytest.raises(OutsideDomain):
        zeta(TWO, 1.5)
    with pytest.raises(OutsideDomain):
        zeta_prime(TWO, 3.0)


def test_component_index_vectorized():
    assert list(component_index(as_context(TWO), np.array([0.2, 2.9]))) == [0, 1]


def test_preimages_examples():
    assert np.allclose(preimages(TWO, 0.0), [(3 - ROOT3) / 2, (3 + ROOT3) / 2], atol=1e-15)
    assert np.allclose(preimages(TWO, 0.0), [0.6339746, 2.3660254], atol=1e-7)
    assert preimages(UNIT, 0.0) == pytest.approx([0.5], abs=1e-15)


def test_preimages_shape():
    out = preimages(TWO, np.array([0.0, 1.0, -2.0]))
    assert out.shape == (3, 2)
    assert np.all(np.diff(out, axis=1) > 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_zeta_prime_positive(n):
    rng = np.random.default_rng(n)
    for _ in range(3):
        E = random_ninterval(rng, n)
        for c in E.components:
            x = np.linspace(c.lo, c.hi, 1002)[1:-1]
            assert np.all(zeta_prime(E, x) > 0)
            assert np.all(np.diff(zeta(E, x)) > 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6), st.floats(-8, 8))
def test_round_trip(n, seed, z):
    E = random_ninterval(np.random.default_rng(seed), n)
    xs = preimages(E, z)
    # evaluating zeta at a rounded x costs up to eps |x| zeta'(x)
    cond = 4e-16 * np.abs(xs) * zeta_prime(E, xs)
    assert np.all(np.abs(zeta(E, xs) - z) < 1e-12 * max(1.0, abs(z)) + cond)
    for k, x in enumerate(xs):
        assert E.components[k].lo < x < E.components[k].hi
        assert preimages(E, zeta(E, x))[k] == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_preimage_single_branch():
    assert preimage(TWO, 0.0, 1) == pytest.approx((3 + ROOT3) / 2)


def test_invert_far_targets_keep_relative_accuracy():
    # zeta -> -40 sits about e^-40 from a left endpoint
    x = invert(UNIT, [-40.0, 40.0], [0, 0])
    assert x[0] == pytest.approx(math.exp(-40) / (1 + math.exp(-40)), rel=1e-12)
    assert 1 - x[1] == pytest.approx(math.exp(-40), rel=1e-6)


@pytest.mark.parametrize("pairs", [
    [(0, math.inf)],
    [(-math.inf, 0)],
    [(-math.inf, -3), (0, 1)],
    [(0, 1), (2, math.inf)],
])
def test_infinite_endpoints(pairs):
    E = NInterval.from_pairs(pairs)
    zs = np.linspace(-5, 5, 11)
    xs = preimages(E, zs)
    assert np.allclose(zeta(E, xs), zs[:, None], atol=1e-12)


def test_half_line_is_log():
    E = NInterval.from_pairs([(0, math.inf)])
    assert zeta(E, 2.0) == pytest.approx(math.log(2.0))


def test_whole_line_rejected():
    with pytest.raises(ValueError):
        NInterval.from_pairs([(-math.inf, math.inf)])


# ---------------------------------------------------------------------------
# g


def test_g_collapses_components():
    mu = MoebiusMap.identity()
    a, b = preimages(TWO, 0.0)
    assert abs(g_map(TWO, mu, cayley(a)) - g_map(TWO, mu, cayley(b))) < 1e-10
    rng = np.random.default_rng(5)
    E = random_ninterval(rng, 4)
    for z0 in rng.uniform(-4, 4, 10):
        pts = [g_map(E, mu, cayley(x)) for x in preimages(E, z0)]
        assert max(abs(p - pts[0]) for p in pts) < 1e-10


def test_g_lands_on_upper_half_circle():
    mu = MoebiusMap.identity()
    for x in np.linspace(0.05, 0.95, 7):
        w = g_map(UNIT, mu, cayley(x))
        assert abs(abs(w) - 1) < 1e-12 and w.imag > 0


def test_g_single_half_line_identity():
    E = NInterval.from_pairs([(0, math.inf)])
    for x in (0.1, 1.0, 7.0):
        z = cayley(x)
        assert abs(g_map(E, MoebiusMap.identity(), z) - z) < 1e-12


def test_g_endpoints():
    mu = MoebiusMap.identity()
    assert abs(g_map(UNIT, mu, cayley(1e-12)) - 1) < 1e-10
    assert abs(g_map(UNIT, mu, cayley(1 - 1e-14)) + 1) < 1e-6


def test_g_is_power_on_symmetric():
    # e^zeta, as a function of z^n, sends the arc ends to 0 and infinity and
    # the image (-1)^n of x = infinity to -1; mu = C o (that map) gives g(z) = z^n
    arc = CircleArc(0.3, 1.5)
    for n in (2, 3):
        E = symmetric_ninterval(arc, n)
        p0, _, p1 = arc.points()
        mu = MoebiusMap.from_points([p0, (-1) ** n, p1], [1, -1j, -1])
        for x in preimages(E, 0.7):
            z = cayley(x)
            assert abs(g_map(E, mu, z) - z**n) < 1e-10
